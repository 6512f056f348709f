#pragma once

/// @file expr_text.hpp
/// Text form of structure expressions:
///
///   expr := "kofn(" INT "," INT ")" | "series(" INT ")" | "parallel(" INT ")"
///         | "consec(" INT "," INT ["," ("circular" | "linear")] ")"
///         | "prod(" expr "," expr ")"
///         | "explicit(" INT ";" BITSTRING ("," BITSTRING)* ")"
///
/// Whitespace between tokens is ignored. In prod(a, b), a is the inner
/// system placed at each component of b. Bitstrings list every member.

#include <string>
#include <string_view>

#include "thresholdlab/structures.hpp"

namespace thresholdlab {

/// Throws ParseError on malformed text or an invalid structure; the offset
/// points at the offending token or at the start of the rejected term.
StructureExpr parse_expr(std::string_view text);

/// Canonical text; parse_expr(format_expr(e)) denotes the same set.
std::string format_expr(const StructureExpr& expr);

}  // namespace thresholdlab
