#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace vilenkin;

using fixture::code_of;
using fixture::example1;
using fixture::example2;
using fixture::sample_contexts;

TEST(DilationPair, ExampleOneMatrix)
{
    const auto pair = validate_dilation_pair(IntMatrix{{2, 0}, {1, 2}});
    EXPECT_EQ(pair.det, 4);
    EXPECT_EQ(pair.m, 4u);
    EXPECT_EQ(pair.Mstar, (IntMatrix{{2, 1}, {0, 2}}));
    EXPECT_EQ(pair.M * pair.adjugate, (IntMatrix{{4, 0}, {0, 4}}));
}

TEST(DilationPair, ExampleTwoMatrix)
{
    const auto pair = validate_dilation_pair(IntMatrix{{2, 1}, {-1, 1}});
    EXPECT_EQ(pair.det, 3);
    EXPECT_EQ(pair.m, 3u);
    EXPECT_EQ(pair.Mstar, (IntMatrix{{2, -1}, {1, 1}}));
}

TEST(DilationPair, Rejections)
{
    EXPECT_EQ(code_of([] { validate_dilation_pair(IntMatrix{{1, 0}, {0, 2}}); }), ErrorCode::NotExpanding);
    EXPECT_EQ(code_of([] { validate_dilation_pair(IntMatrix{{2, 4}, {1, 2}}); }), ErrorCode::Singular);
    EXPECT_EQ(code_of([] { validate_dilation_pair(IntMatrix{{1, 1}, {0, 1}}); }), ErrorCode::UnitDeterminant);
    EXPECT_EQ(code_of([] { validate_dilation_pair(IntMatrix{{2, 0, 1}, {0, 2, 1}}); }), ErrorCode::NotSquare);
    // det 3 but eigenvalues 3 and 1
    EXPECT_EQ(code_of([] { validate_dilation_pair(IntMatrix{{3, 5}, {0, 1}}); }), ErrorCode::NotExpanding);
}

TEST(DilationPair, AdjugateIdentityOnRandomMatrices)
{
    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
        const std::size_t d = 1 + rng() % 4;
        IntMatrix a(d, d);
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c)
                a(r, c) = static_cast<std::int64_t>(rng() % 11) - 5;
        const auto det = determinant(a);
        IntMatrix expected(d, d);
        for (std::size_t i = 0; i < d; ++i)
            expected(i, i) = det;
        EXPECT_EQ(a * adjugate(a), expected);
        EXPECT_EQ(adjugate(a) * a, expected);
    }
}

TEST(DigitSet, ExampleOneDualIsValid)
{
    const auto pair = validate_dilation_pair(IntMatrix{{2, 0}, {1, 2}});
    const std::vector<IntVector> listed{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    EXPECT_EQ(resolve_digit_set(pair, Side::dual, listed).digits, listed);
}

TEST(DigitSet, ExampleTwoCandidates)
{
    const auto pair = validate_dilation_pair(IntMatrix{{2, 1}, {-1, 1}});
    // M^{-1}(1,1) = (0,1) is integral
    EXPECT_EQ(code_of([&] { resolve_digit_set(pair, Side::primal, std::vector<IntVector>{{0, 0}, {0, 1}, {1, 1}}); }),
              ErrorCode::CongruentDigits);
    EXPECT_NO_THROW(resolve_digit_set(pair, Side::primal, std::vector<IntVector>{{0, 0}, {1, 0}, {2, 0}}));
    EXPECT_NO_THROW(resolve_digit_set(pair, Side::dual, std::vector<IntVector>{{0, 0}, {0, 1}, {1, 1}}));
}

TEST(DigitSet, InputErrors)
{
    const auto pair = validate_dilation_pair(IntMatrix{{2, 1}, {-1, 1}});
    EXPECT_EQ(code_of([&] { resolve_digit_set(pair, Side::primal, std::vector<IntVector>{{1, 0}, {0, 0}, {2, 0}}); }),
              ErrorCode::MissingZeroDigit);
    EXPECT_EQ(code_of([&] { resolve_digit_set(pair, Side::primal, std::vector<IntVector>{{0, 0}, {1, 0}}); }),
              ErrorCode::WrongCount);
}

TEST(DigitSet, DefaultGenerationReproducesListedDualSets)
{
    const auto ex1 = validate_dilation_pair(IntMatrix{{2, 0}, {1, 2}});
    EXPECT_EQ(resolve_digit_set(ex1, Side::dual).digits, (std::vector<IntVector>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
    EXPECT_EQ(resolve_digit_set(ex1, Side::primal).digits, (std::vector<IntVector>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
    const auto ex2 = validate_dilation_pair(IntMatrix{{2, 1}, {-1, 1}});
    EXPECT_EQ(resolve_digit_set(ex2, Side::dual).digits, (std::vector<IntVector>{{0, 0}, {0, 1}, {1, 1}}));
}

TEST(DigitSet, DefaultSetsAreCompleteResidueSystems)
{
    std::mt19937_64 rng(5);
    for (int t = 0; t < 60; ++t) {
        const unsigned m = 2 + rng() % 6;
        const IntMatrix M = oracle::random_dilation(rng, m, 1 + rng() % 2);
        const auto pair = validate_dilation_pair(M);
        for (Side side : {Side::primal, Side::dual}) {
            const auto set = resolve_digit_set(pair, side);
            ASSERT_EQ(set.size(), m);
            EXPECT_TRUE(detail::is_zero(set.digits[0]));
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = i + 1; j < m; ++j)
                    EXPECT_FALSE(oracle::divisible_by_search(pair.matrix(side),
                                                             detail::difference(set.digits[i], set.digits[j])));
        }
    }
}

TEST(Congruence, AgreesWithBoundedSearch)
{
    std::mt19937_64 rng(9);
    for (int t = 0; t < 40; ++t) {
        const IntMatrix M = oracle::random_dilation(rng, 2 + rng() % 5, 2);
        const auto pair = validate_dilation_pair(M);
        for (int s = 0; s < 50; ++s) {
            const IntVector a{static_cast<std::int64_t>(rng() % 9) - 4, static_cast<std::int64_t>(rng() % 9) - 4};
            const IntVector b{static_cast<std::int64_t>(rng() % 9) - 4, static_cast<std::int64_t>(rng() % 9) - 4};
            EXPECT_EQ(congruent(pair, Side::primal, a, b),
                      oracle::divisible_by_search(M, detail::difference(a, b), 40));
            EXPECT_EQ(congruent(pair, Side::dual, a, b),
                      oracle::divisible_by_search(pair.Mstar, detail::difference(a, b), 40));
        }
    }
}

TEST(GroupContext, ExampleTwoPrimalTableIsCyclic)
{
    const auto ctx = example2();
    EXPECT_EQ(ctx->add(Side::primal, 1, 2), 0u);
    EXPECT_EQ(ctx->add(Side::primal, 1, 1), 2u);
    EXPECT_EQ(ctx->add(Side::primal, 2, 2), 1u);
    EXPECT_EQ(gamma_add_index(*ctx, Side::primal, 1, 2), 0u);
    EXPECT_EQ(gamma_add_index(*ctx, Side::primal, 1, 1), 2u);
}

TEST(GroupContext, ExampleOnePairing)
{
    const auto ctx = example1();
    EXPECT_EQ(ctx->pairing(1, 1), 2u);
    EXPECT_NEAR(std::abs(ctx->root(ctx->pairing(1, 1)) - Complex(-1.0)), 0.0, 0.0);
    for (Digit j = 0; j < ctx->m(); ++j) {
        EXPECT_EQ(ctx->pairing(0, j), 0u);
        EXPECT_EQ(ctx->pairing(j, 0), 0u);
    }
}

TEST(GroupContext, PairingMatchesInverseMatrixDefinition)
{
    // exp(2 pi i <M^{-1} s, s*>) computed in floating point
    for (const auto& ctx : sample_contexts()) {
        const auto& pair = ctx->pair();
        for (Digit i = 0; i < ctx->m(); ++i)
            for (Digit j = 0; j < ctx->m(); ++j) {
                const auto& s = ctx->digits(Side::primal).digits[i];
                const auto& t = ctx->digits(Side::dual).digits[j];
                const IntVector adj_s = pair.adjugate.apply(s);
                double x = 0;
                for (std::size_t c = 0; c < s.size(); ++c)
                    x += static_cast<double>(adj_s[c]) * static_cast<double>(t[c]) / static_cast<double>(pair.det);
                const Complex direct(std::cos(2 * oracle::kPi * x), std::sin(2 * oracle::kPi * x));
                EXPECT_LT(std::abs(direct - ctx->root(ctx->pairing(i, j))), 1e-12);
            }
    }
}

TEST(GroupContext, CayleyTablesAreAbelianGroups)
{
    for (const auto& ctx : sample_contexts())
        for (Side side : {Side::primal, Side::dual}) {
            const unsigned m = ctx->m();
            for (Digit a = 0; a < m; ++a) {
                EXPECT_EQ(ctx->add(side, a, 0), a);
                EXPECT_EQ(ctx->add(side, a, ctx->negate(side, a)), 0u);
                std::vector<bool> row(m), col(m);
                for (Digit b = 0; b < m; ++b) {
                    EXPECT_EQ(ctx->add(side, a, b), ctx->add(side, b, a));
                    row[ctx->add(side, a, b)] = true;
                    col[ctx->add(side, b, a)] = true;
                    for (Digit c = 0; c < m; ++c)
                        EXPECT_EQ(ctx->add(side, ctx->add(side, a, b), c), ctx->add(side, a, ctx->add(side, b, c)));
                }
                EXPECT_TRUE(std::all_of(row.begin(), row.end(), [](bool v) { return v; }));
                EXPECT_TRUE(std::all_of(col.begin(), col.end(), [](bool v) { return v; }));
            }
        }
}

TEST(GroupContext, PairingIsBilinear)
{
    for (const auto& ctx : sample_contexts()) {
        const unsigned m = ctx->m();
        for (Digit i = 0; i < m; ++i)
            for (Digit i2 = 0; i2 < m; ++i2)
                for (Digit j = 0; j < m; ++j) {
                    EXPECT_EQ(ctx->pairing(ctx->add(Side::primal, i, i2), j),
                              (ctx->pairing(i, j) + ctx->pairing(i2, j)) % m);
                    EXPECT_EQ(ctx->pairing(j, ctx->add(Side::dual, i, i2)),
                              (ctx->pairing(j, i) + ctx->pairing(j, i2)) % m);
                }
    }
}

TEST(GroupElement, CanonicalForm)
{
    const auto x = GroupElement::from_positions(Side::primal, -3, {0, 2, 0, 1, 0, 0});
    EXPECT_EQ(x.lowest_position(), -2);
    EXPECT_EQ(x.highest_position(), 0);
    EXPECT_EQ(x.int_digits(), (std::vector<Digit>{2, 0, 1}));
    EXPECT_TRUE(x.frac_digits().empty());
    EXPECT_TRUE(x.in_H());
    EXPECT_EQ(x, GroupElement::from_parts(Side::primal, {0, 2, 0, 1}, {0, 0}));
    EXPECT_TRUE(GroupElement::from_positions(Side::dual, 4, {0, 0}).is_neutral());

    const auto y = GroupElement::from_parts(Side::dual, {}, {0, 3, 1});
    EXPECT_TRUE(y.int_digits().empty());
    EXPECT_EQ(y.frac_digits(), (std::vector<Digit>{0, 3, 1}));
    EXPECT_FALSE(y.in_H());
}

TEST(GroupElement, AdditionLaws)
{
    std::mt19937_64 rng(3);
    for (const auto& ctx : sample_contexts())
        for (int t = 0; t < 50; ++t) {
            const auto x = oracle::random_element(rng, *ctx, Side::primal, -4, 3);
            const auto y = oracle::random_element(rng, *ctx, Side::primal, -2, 5);
            const auto z = oracle::random_element(rng, *ctx, Side::primal, -6, 1);
            EXPECT_EQ(add(*ctx, x, GroupElement(Side::primal)), x);
            EXPECT_TRUE(add(*ctx, x, negate(*ctx, x)).is_neutral());
            EXPECT_EQ(add(*ctx, x, y), add(*ctx, y, x));
            EXPECT_EQ(add(*ctx, add(*ctx, x, y), z), add(*ctx, x, add(*ctx, y, z)));
        }
    const auto ctx = example1();
    EXPECT_EQ(code_of([&] {
                  add(*ctx, GroupElement::from_parts(Side::primal, {1}), GroupElement::from_parts(Side::dual, {1}));
              }),
              ErrorCode::SideMismatch);
}

TEST(GroupElement, GammaIndexAdditionMatchesElements)
{
    std::mt19937_64 rng(4);
    for (const auto& ctx : sample_contexts())
        for (int t = 0; t < 100; ++t) {
            const Index k = rng() % 100000, l = rng() % 100000;
            for (Side side : {Side::primal, Side::dual}) {
                EXPECT_EQ(add(*ctx, gamma_of(*ctx, k, side), gamma_of(*ctx, l, side)),
                          gamma_of(*ctx, gamma_add_index(*ctx, side, k, l), side));
                EXPECT_EQ(negate(*ctx, gamma_of(*ctx, k, side)), gamma_of(*ctx, gamma_negate_index(*ctx, side, k), side));
            }
        }
}

TEST(Dilate, Rules)
{
    const auto ctx = example2();
    EXPECT_TRUE(dilate(GroupElement(Side::primal), 5).is_neutral());
    std::mt19937_64 rng(6);
    for (int t = 0; t < 50; ++t) {
        const auto x = oracle::random_element(rng, *ctx, Side::primal, -3, 4);
        EXPECT_EQ(dilate(dilate(x, 3), -3), x);
        const Index k = rng() % 5000;
        EXPECT_EQ(dilate(gamma_of(*ctx, k), 1), gamma_of(*ctx, k * ctx->m()));
    }
}

TEST(Gamma, DigitsAndAddresses)
{
    const auto ctx = example2();
    EXPECT_TRUE(gamma_of(*ctx, 0).is_neutral());
    const auto g = gamma_of(*ctx, 5); // 5 = 2 + 1*3
    EXPECT_EQ(g.digit(0), 2u);
    EXPECT_EQ(g.digit(-1), 1u);
    EXPECT_EQ(coset_address(*ctx, gamma_of(*ctx, 7), 0).k, 7u);
}

TEST(Gamma, CosetAddressRoundTrip)
{
    for (const auto& ctx : {example2(), example1()}) {
        const Index limit = detail::checked_pow(ctx->m(), 8);
        for (int n = -3; n <= 3; ++n)
            for (Index k = 0; k < limit; ++k) {
                const CosetAddress address{Side::primal, n, k};
                ASSERT_EQ(coset_address(*ctx, coset_representative(*ctx, address), n), address);
            }
    }
}

TEST(Gamma, CosetAddressIgnoresFinerDigits)
{
    const auto ctx = example1();
    std::mt19937_64 rng(12);
    for (int t = 0; t < 200; ++t) {
        const int n = static_cast<int>(rng() % 5) - 2;
        const auto x = oracle::random_element(rng, *ctx, Side::primal, -3, n);
        const auto fine = oracle::random_element(rng, *ctx, Side::primal, n + 1, n + 3);
        EXPECT_EQ(coset_address(*ctx, x, n), coset_address(*ctx, add(*ctx, x, fine), n));
        EXPECT_EQ(coset_representative(*ctx, coset_address(*ctx, x, n)), x);
    }
}

TEST(Character, ExampleOneValue)
{
    const auto ctx = example1();
    const auto x = GroupElement::from_parts(Side::primal, {1});
    const auto omega = GroupElement::from_parts(Side::dual, {}, {1});
    EXPECT_EQ(char_exponent(*ctx, x, omega), 2u);
    EXPECT_EQ(char_exponent(*ctx, GroupElement(Side::primal), omega), 0u);
}

TEST(Character, MultiplicativeInBothArguments)
{
    std::mt19937_64 rng(8);
    for (const auto& ctx : sample_contexts())
        for (int t = 0; t < 200; ++t) {
            const auto x = oracle::random_element(rng, *ctx, Side::primal, -4, 3);
            const auto y = oracle::random_element(rng, *ctx, Side::primal, -3, 4);
            const auto w = oracle::random_element(rng, *ctx, Side::dual, -3, 5);
            const auto v = oracle::random_element(rng, *ctx, Side::dual, -2, 4);
            const unsigned m = ctx->m();
            EXPECT_EQ(char_exponent(*ctx, add(*ctx, x, y), w), (char_exponent(*ctx, x, w) + char_exponent(*ctx, y, w)) % m);
            EXPECT_EQ(char_exponent(*ctx, x, add(*ctx, w, v)), (char_exponent(*ctx, x, w) + char_exponent(*ctx, x, v)) % m);
            // chi(M x, omega) = chi(x, M* omega)
            EXPECT_EQ(char_exponent(*ctx, dilate(x, 1), w), char_exponent(*ctx, x, dilate(w, 1)));
        }
}
