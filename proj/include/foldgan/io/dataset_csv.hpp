#pragma once

// Dataset files. Optional leading comment lines start with '#'; the line
// "# normalized=1" marks every heatmap as normalized. The header is
// id,label,P,D,v_0,...,v_{P*D-1}; value v_{c*P+r} is cell (r, c), i.e. the
// unfolded day-by-day order. Values use the shortest round-trip decimal form.

#include <iosfwd>
#include <string>
#include <vector>

#include "foldgan/loadsim.hpp"

namespace foldgan::io {

void write_dataset(std::ostream& out, const LabelledDataset& ds);
void save_dataset(const std::string& path, const LabelledDataset& ds);

/// Throws DataError with the offending line number on malformed input.
LabelledDataset read_dataset(std::istream& in);
LabelledDataset load_dataset(const std::string& path);

/// Raw series files: header id,label,sample_minutes,values... and one series
/// per line with any number of readings.
std::vector<LoadSeries> read_series(std::istream& in);
std::vector<LoadSeries> load_series(const std::string& path);
void write_series(std::ostream& out, const std::vector<LoadSeries>& series);

}  // namespace foldgan::io
