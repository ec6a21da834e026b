#pragma once

// CSV serialization of grid functions.
//
// Header: `# n,dim,L,h[,level_1,...]`, then one row per node in flat order:
// `x_1[,x_2],value` for boundary functions, `x_1[,x_2],v_1,...,v_K` for fields.

#include <iosfwd>
#include <string>

#include "tracelab/grid.hpp"

namespace tracelab {

void write_csv(std::ostream& os, const BoundaryGridFunction& f);
void write_csv(std::ostream& os, const HalfSpaceField& u);

/// Throws ParseError with the line number on malformed input, including
/// non-finite values and a row count that does not match the header grid.
BoundaryGridFunction read_boundary_csv(std::istream& is);
HalfSpaceField read_field_csv(std::istream& is);

BoundaryGridFunction load_boundary_data(const std::string& path);
void save_boundary_data(const std::string& path, const BoundaryGridFunction& f);

/// %.17g; round-trips every double.
std::string format_double(double x);

}  // namespace tracelab
