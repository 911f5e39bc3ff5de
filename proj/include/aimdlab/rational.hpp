//
// Copyright (c) 2026 The aimdlab Authors
//
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace aimdlab {

/// Exact rational scalar for the synchronous model. Window halving builds
/// power-of-two denominators, so arbitrary precision keeps every cycle
/// identity exact instead of accumulating float error.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double d) { return d; }

}  // namespace aimdlab
