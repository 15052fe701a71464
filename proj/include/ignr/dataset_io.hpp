#pragma once

#include <iosfwd>
#include <string>

#include "ignr/graphon.hpp"

namespace ignr {

// JSON Lines, one graph per line:
//   {"n": 5, "edges": [[0,1],[1,4]], "alpha": 0.25|null, "seed": 7}
// Edges are listed once with i < j. Weighted adjacencies are thresholded at
// 0.5 on write.

void write_dataset(std::ostream& out, const Dataset& ds);
void save_dataset(const std::string& path, const Dataset& ds);

/// Throws ParseError with the offending line number.
Dataset read_dataset(std::istream& in);
Dataset load_dataset(const std::string& path);

}  // namespace ignr
