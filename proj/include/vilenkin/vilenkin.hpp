#pragma once

#include "vilenkin/construction.hpp"
#include "vilenkin/error.hpp"
#include "vilenkin/group.hpp"
#include "vilenkin/int_matrix.hpp"
#include "vilenkin/test_function.hpp"
#include "vilenkin/walsh.hpp"
#include "vilenkin/wavelet.hpp"
