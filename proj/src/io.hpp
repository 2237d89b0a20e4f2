#pragma once

// JSON files for datasets and SOCP instances, and the per-iteration trace
// CSV.
//
// dataset:  {"format": "qipm-svm-dataset", "n", "m", "p", "seed",
//            "labels": [m], "X": [n*m, column-major]}
// instance: {"format": "qipm-socp", "m", "n", "cones": [sizes],
//            "A": [m*n, row-major], "b": [m], "c": [n],
//            optional "x0": [n] strictly feasible primal start,
//            optional "svm": {"features", "points", "folded_bias",
//                             "margin_surplus"}}

#include <iosfwd>
#include <optional>
#include <string>

#include "ipm.hpp"
#include "svm.hpp"

namespace qipm {

void save_dataset(const SvmDataset& data, const std::string& path);
SvmDataset load_dataset(const std::string& path);

struct LoadedInstance {
  SocpInstance instance;
  std::optional<BlockVector> primal_hint;
};

void save_instance(const SocpInstance& inst, const std::string& path,
                   const std::optional<BlockVector>& primal_hint = {});
LoadedInstance load_instance(const std::string& path);

/// "qipm-svm-dataset" or "qipm-socp"; throws parse_error otherwise.
std::string file_format(const std::string& path);

void write_trace_csv(const SolveTrace& trace, std::ostream& out);

/// Shortest decimal text that reads back to the same double; "nan", "inf".
std::string format_double(double v);

}  // namespace qipm
