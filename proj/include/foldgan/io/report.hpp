#pragma once

// Evaluation report text. Three sections:
//   [trials]   one CSV row per trial (confusion counts, per-class and macro
//              precision/recall/F1, status, error text for failed trials)
//   [summary]  trial and failure counts, then a five-number row per metric
//              over the successful trials
//   [topK]     rank,trial,f1,precision,recall by macro F1
// Numbers use the shortest round-trip decimal form.

#include <string>

#include "foldgan/tstr.hpp"

namespace foldgan::io {

std::string format_report(const tstr::EvalReport& report);

/// Rebuilds the trial rows of a report and re-aggregates with top `k`.
/// Throws DataError on malformed input.
tstr::EvalReport parse_report(const std::string& text, std::size_t k = 5);

}  // namespace foldgan::io
