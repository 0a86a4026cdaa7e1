#pragma once

#include <iosfwd>
#include <string>

#include "sparse_ocp/grid.hpp"

namespace sparse_ocp {

// CSV layout: header `k,i0[,i1],value`, one row per node, k = 1..nt.
// Terminal slices drop the k column. Values are written with 17 significant
// digits so a write/read cycle is exact.
void write_csv(const Field& f, std::ostream& out);
void write_csv(const Field& f, const std::string& path);

Field read_csv(const SpaceTimeGrid& grid, FieldKind kind, std::istream& in);
Field read_csv(const SpaceTimeGrid& grid, FieldKind kind, const std::string& path);

}  // namespace sparse_ocp
