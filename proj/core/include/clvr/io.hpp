// Copyright 2026 The clvr Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Text formats: LibSVM datasets, GLP problem files and CSV metric traces.
//
// GLP files are line oriented:
//
//   glp <n> <d> <nnz> <sigma>
//   c <d values>
//   b <n values>
//   spec <d tokens>
//   <row> <col> <value>        (nnz lines, 0-based)
//
// A spec token is a constraint, N (x >= 0), F (free) or B:lo:hi, optionally
// followed by a regularizer suffix +lin:w, +l1:w or +sq:w. Numbers are
// written in shortest round-trip form, so reading a written file reproduces
// the instance exactly.

#ifndef CLVR_IO_HPP_
#define CLVR_IO_HPP_

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "clvr/dro.hpp"
#include "clvr/glp.hpp"
#include "clvr/metrics.hpp"

namespace clvr {

// Shortest decimal form that parses back to the same double.
std::string FormatDouble(double v);

// Labels are mapped to +1 / -1: with two distinct labels the smaller becomes
// -1; a single label maps to -1 when it is <= 0. The feature dimension is the
// largest index seen unless `dims` is given, in which case larger indices are
// rejected. Throws ParseError with the line number on malformed input and
// ParameterError for more than two classes.
Dataset ParseLibsvm(std::istream& in, std::optional<Index> dims = {});
Dataset ParseLibsvmFile(const std::string& path, std::optional<Index> dims = {});
void WriteLibsvm(std::ostream& out, const Dataset& data);

// Throws UnsupportedError for custom regularizers.
void WriteGlp(std::ostream& out, const GlpInstance& p);
void WriteGlpFile(const std::string& path, const GlpInstance& p);
// Throws ParseError on malformed input or a header that disagrees with the body.
GlpInstance ReadGlp(std::istream& in);
GlpInstance ReadGlpFile(const std::string& path);

inline constexpr std::string_view kCsvHeader =
    "epoch,iter,data_passes,wall_ms,lp_metric,primal_obj,infeas";

class CsvTraceWriter {
 public:
  explicit CsvTraceWriter(std::ostream& out) : out_(&out) {}
  void WriteHeader();
  void Write(const MetricsRecord& rec);

 private:
  std::ostream* out_;
};

}  // namespace clvr

#endif  // CLVR_IO_HPP_
