#pragma once

// Point-sampling helpers shared by the Green's function code. Not installed.

#include <array>
#include <random>
#include <vector>

#include "curve_internal.hpp"
#include "thetagreen/curve.hpp"

namespace thetagreen::detail {

bool same_point(const CurveModel& c, const CurvePoint& a, const CurvePoint& b, double tol);

/// Distance of the x-coordinates (1/|x| against infinity). Ignores the sheet,
/// so it also bounds the distance to the conjugate point.
double point_distance(const CurvePoint& a, const CurvePoint& b);

double curve_scale(const CurveModel& c);
double min_branch_separation(const CurveModel& c);

/// `count` random points away from the branch points and from each other
/// (in x, hence also from each other's conjugates).
std::vector<CurvePoint> generic_points(const CurveModel& c, int count, std::mt19937_64& rng);

/// The point over x on the sheet continuing the y of p.
CurvePoint near_point(const CurveModel& c, const CurvePoint& p, cd x);

/// Fixed auxiliary pair (R, S) used by the Lambda-based computations.
std::array<CurvePoint, 2> auxiliary_pair(const CurveModel& c);

}  // namespace thetagreen::detail
