#pragma once

// Groups and helpers shared by the unit test suites.

#include "vilenkin/vilenkin.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <vector>

namespace fixture {

using namespace vilenkin;

inline ContextPtr example1() { return make_context(IntMatrix{{2, 0}, {1, 2}}); }

inline ContextPtr example2()
{
    return make_context(IntMatrix{{2, 1}, {-1, 1}}, std::vector<IntVector>{{0, 0}, {1, 0}, {2, 0}},
                        std::vector<IntVector>{{0, 0}, {0, 1}, {1, 1}});
}

inline std::vector<ContextPtr> sample_contexts()
{
    return {example1(),
            example2(),
            make_context(IntMatrix{{3}}),
            make_context(IntMatrix{{-5}}),
            make_context(IntMatrix{{1, -1}, {1, 1}}),
            make_context(IntMatrix{{0, 1}, {3, 0}}),
            make_context(IntMatrix{{2, 1}, {0, 3}})};
}

inline ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::InternalInconsistency;
}

} // namespace fixture
