#pragma once

// JSON import/export. +inf is written as the string "inf".
//
//   space + kernel: {"points": [[...], ...], "weights": [...],
//                    "kernel": {"name": ..., "entries": [[...], ...], "symmetric": bool}}
//   nonlinearity:   {"kind": "power", "q": 2.0} or
//                   {"kind": "general_increasing" | "general_decreasing", "t": [...], "g": [...]}

#include <string>
#include <utility>

#include <json.hpp>

#include "potlab/bounds.hpp"
#include "potlab/measure_kernel.hpp"
#include "potlab/nonlinearity.hpp"
#include "potlab/principles.hpp"
#include "potlab/solver.hpp"

namespace potlab {

using json = nlohmann::json;

json number_to_json(double v);
double number_from_json(const json& j);
json vector_to_json(const Vector& v);
Vector vector_from_json(const json& j);

json space_kernel_to_json(const MeasureSpace& space, const Kernel& kernel);
std::pair<MeasureSpace, Kernel> space_kernel_from_json(const json& j);

/// Throws InvalidArgument for callable (non-tabulated) general kinds.
json nonlinearity_to_json(const Nonlinearity& g);
Nonlinearity nonlinearity_from_json(const json& j);

json to_json(const QuasiMetricReport& r);
json to_json(const PtolemyReport& r);
json to_json(const WmpReport& r);
json to_json(const BoundReport& r);
json to_json(const SolveResult& r);

/// point,pot,bound,condition,margin
std::string to_csv(const BoundReport& r);
/// point,x0..x{d-1},u,status,residual
std::string to_csv(const SolveResult& r, const MeasureSpace& space);

}  // namespace potlab
