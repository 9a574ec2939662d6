#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "dyadic/decomp.hpp"
#include "dyadic/montecarlo.hpp"
#include "dyadic/product.hpp"
#include "dyadic/shift.hpp"

namespace dyadic {

using Json = nlohmann::ordered_json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// {d, N, [omega], samples} with samples in row-major order (axis 1 slowest).
Json to_json(const DyadicFunction& f);
DyadicFunction function_from_json(const Json& j);

/// {first: {d, N}, second: {d, N}, samples} with variable 1 slow.
Json to_json(const ProductFunction& f);
ProductFunction product_from_json(const Json& j);

/// {d, N, [omega], i, j, kind, [orientation, normalization, symbol], entries}.
/// Cubes are {level, pos}; Haar indices add sig as a list of epsilon bits.
Json to_json(const ShiftOperator& s);
ShiftOperator shift_from_json(const Json& j);

/// Self-contained: embeds b, every referenced shift and every P symbol.
Json to_json(const TermList& t);
TermList terms_from_json(const Json& j);

/// Little-endian float64 samples after a 16-byte header "DYF1", u32 d, u32 N, u32 0.
void write_binary(std::ostream& out, const DyadicFunction& f);
DyadicFunction read_function_binary(std::istream& in);
/// 24-byte header "DYP1", u32 d1, N1, d2, N2, u32 0; samples with variable 1 slow.
void write_binary(std::ostream& out, const ProductFunction& f);
ProductFunction read_product_binary(std::istream& in);

/// CSV with columns row,col,mean,stderr.
void write_matrix_csv(std::ostream& out, const AverageResult& r);

}  // namespace dyadic
