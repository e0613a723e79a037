#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "pdagcount/dataset.hpp"
#include "pdagcount/model.hpp"
#include "pdagcount/pdag.hpp"
#include "pdagcount/search.hpp"

namespace pdagcount {

// Header row required. Columns named in `covariates` are parsed as reals,
// every other column as a nonnegative integer. Errors carry 1-based line
// and column positions.
CountDataset read_csv(std::istream& in, const std::vector<std::string>& covariates = {});
CountDataset read_csv_file(const std::filesystem::path& path, const std::vector<std::string>& covariates = {});

// Count columns then covariate columns. Reals use the shortest form that
// reads back to the same double.
void write_csv(std::ostream& out, const CountDataset& data);

std::string model_to_json(const PdagModel& model);
PdagModel model_from_json(std::string_view text);

std::string graph_to_json(const Pdag& g, const std::vector<std::string>& names = {});
// Accepts either a graph document or a model document (its graph is used).
Pdag graph_from_json(std::string_view text);

// One JSON object per line: an "init" record, one "step" record per step,
// and a "final" record.
std::string trace_to_jsonl(const SearchTrace& trace);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace pdagcount
