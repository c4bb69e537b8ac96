#ifndef CARNOT_IO_HPP
#define CARNOT_IO_HPP

#include <iosfwd>
#include <string>

#include "carnot/variation.hpp"

namespace carnot {

// Group specification file:
//   { "strata": [h1,...,hk], "brackets": [ {"i":1,"j":2,"r":3,"c":1}, ... ] }
// listing only i<j entries (1-based indices); skew completion is automatic.
// Coefficients given as integers or "p/q" strings are validated exactly.
CarnotGroup group_from_json(const std::string& json_text);
CarnotGroup group_from_json_file(const std::string& path);

// Patch specification:
//   { "axis": 3, "lo": [0,0], "hi": [1,1], "res": 64, "rule": "midpoint",
//     "mask_radius": 1e-3, "guess": 0.0 }
// "axis" is 1-based; "res" is an integer or per-axis array.
PatchSpec patch_from_json(const std::string& json_text, int dim);

// Fixed-format floating point for deterministic artifacts: 17 significant
// digits, '.' decimal separator, "nan"/"inf" spelled lowercase.
std::string format_g17(double v);

// Scan table: one row per node, columns
//   u..., x..., p_h_nu, varpi..., H_cc, S2, A2, B_TS, sigmaR, sigmaH, masked
std::string scan_csv(const QuadraturePatch& patch);
// Same table as a JSON array of objects (numbers formatted as in the CSV).
std::string scan_json(const QuadraturePatch& patch);

// Diagnostic SVG raster of one scan column over a 2-d chart domain.
// column: "b_ts" | "p_h_nu" | "h_cc" | "s2" | "a2" | "sigma_h" | "varpi<j>"
std::string scan_svg(const QuadraturePatch& patch, const std::string& column);

double scan_column_value(const PatchNode& node, const std::string& column);

}  // namespace carnot

#endif
