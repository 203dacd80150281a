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

#include "clvr/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <vector>

#include "clvr/error.hpp"

namespace clvr {
namespace {

std::vector<std::string_view> Split(std::string_view line, char sep = ' ') {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == sep || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != sep && line[end] != '\t' && line[end] != '\r') ++end;
    out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

double ParseReal(std::string_view tok, std::size_t line, const char* what) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
    throw ParseError(std::string("bad ") + what + " '" + std::string(tok) + "'", line);
  }
  return v;
}

Index ParseCount(std::string_view tok, std::size_t line, const char* what) {
  Index v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
    throw ParseError(std::string("bad ") + what + " '" + std::string(tok) + "'", line);
  }
  return v;
}

std::ifstream OpenIn(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

std::string SpecToken(const CoordSpec& s) {
  std::string tok;
  switch (s.constraint.kind) {
    case ConstraintKind::kFree:
      tok = "F";
      break;
    case ConstraintKind::kNonNegative:
      tok = "N";
      break;
    case ConstraintKind::kBox:
      tok = "B:" + FormatDouble(s.constraint.lo) + ":" + FormatDouble(s.constraint.hi);
      break;
  }
  switch (s.regularizer.kind) {
    case RegularizerKind::kZero:
      break;
    case RegularizerKind::kLinear:
      tok += "+lin:" + FormatDouble(s.regularizer.weight);
      break;
    case RegularizerKind::kAbsValue:
      tok += "+l1:" + FormatDouble(s.regularizer.weight);
      break;
    case RegularizerKind::kQuadratic:
      tok += "+sq:" + FormatDouble(s.regularizer.weight);
      break;
    case RegularizerKind::kCustom:
      throw UnsupportedError("custom regularizers cannot be serialized");
  }
  return tok;
}

CoordSpec ParseSpecToken(std::string_view tok, std::size_t line) {
  CoordSpec s;
  const std::size_t plus = tok.find('+');
  const std::string_view con = tok.substr(0, plus);
  try {
    if (con == "N") {
      s.constraint = Constraint::NonNegative();
    } else if (con == "F") {
      s.constraint = Constraint::Free();
    } else if (con.substr(0, 2) == "B:") {
      const std::string_view rest = con.substr(2);
      const std::size_t colon = rest.find(':');
      if (colon == std::string_view::npos) throw ParseError("bad box token", line);
      s.constraint = Constraint::Box(ParseReal(rest.substr(0, colon), line, "box bound"),
                                     ParseReal(rest.substr(colon + 1), line, "box bound"));
    } else {
      throw ParseError("unknown constraint token '" + std::string(tok) + "'", line);
    }
    if (plus != std::string_view::npos) {
      const std::string_view reg = tok.substr(plus + 1);
      const std::size_t colon = reg.find(':');
      if (colon == std::string_view::npos) throw ParseError("bad regularizer token", line);
      const std::string_view name = reg.substr(0, colon);
      const double w = ParseReal(reg.substr(colon + 1), line, "regularizer weight");
      if (name == "lin") {
        s.regularizer = Regularizer::Linear(w);
      } else if (name == "l1") {
        s.regularizer = Regularizer::AbsValue(w);
      } else if (name == "sq") {
        s.regularizer = Regularizer::Quadratic(w);
      } else {
        throw ParseError("unknown regularizer '" + std::string(name) + "'", line);
      }
    }
  } catch (const ParameterError& e) {
    throw ParseError(e.what(), line);
  }
  return s;
}

// Next line that is not blank; false at end of input.
bool NextLine(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

std::vector<double> ParseVectorLine(std::istream& in, std::size_t& line_no,
                                    std::string_view tag, Index expected) {
  std::string line;
  if (!NextLine(in, line, line_no)) {
    throw ParseError("missing '" + std::string(tag) + "' line", line_no);
  }
  const auto toks = Split(line);
  if (toks.empty() || toks[0] != tag) {
    throw ParseError("expected '" + std::string(tag) + "' line", line_no);
  }
  if (toks.size() - 1 != expected) {
    throw ParseError("'" + std::string(tag) + "' line has " + std::to_string(toks.size() - 1) +
                         " values, expected " + std::to_string(expected),
                     line_no);
  }
  std::vector<double> v(expected);
  for (Index i = 0; i < expected; ++i) v[i] = ParseReal(toks[i + 1], line_no, "value");
  return v;
}

}  // namespace

std::string FormatDouble(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Dataset ParseLibsvm(std::istream& in, std::optional<Index> dims) {
  std::vector<double> raw_labels;
  std::vector<Triplet> entries;
  Index max_col = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    const std::string_view body = std::string_view(line).substr(0, hash);
    const auto toks = Split(body);
    if (toks.empty()) continue;
    const Index row = raw_labels.size();
    raw_labels.push_back(ParseReal(toks[0], line_no, "label"));
    for (std::size_t t = 1; t < toks.size(); ++t) {
      const std::size_t colon = toks[t].find(':');
      if (colon == std::string_view::npos) {
        throw ParseError("feature '" + std::string(toks[t]) + "' is not index:value", line_no);
      }
      const Index idx = ParseCount(toks[t].substr(0, colon), line_no, "feature index");
      if (idx == 0) throw ParseError("feature indices are 1-based", line_no);
      if (dims && idx > *dims) {
        throw ParseError("feature index " + std::to_string(idx) + " exceeds dimension " +
                             std::to_string(*dims),
                         line_no);
      }
      const double v = ParseReal(toks[t].substr(colon + 1), line_no, "feature value");
      entries.push_back({row, idx - 1, v});
      max_col = std::max(max_col, idx);
    }
  }
  const std::set<double> classes(raw_labels.begin(), raw_labels.end());
  if (classes.size() > 2) {
    throw ParameterError("LibSVM data has " + std::to_string(classes.size()) +
                         " classes; only binary labels are supported");
  }
  Dataset data;
  data.labels.resize(raw_labels.size());
  const double low = classes.empty() ? 0.0 : *classes.begin();
  for (Index i = 0; i < raw_labels.size(); ++i) {
    if (classes.size() == 2) {
      data.labels[i] = raw_labels[i] == low ? -1.0 : 1.0;
    } else {
      data.labels[i] = raw_labels[i] <= 0.0 ? -1.0 : 1.0;
    }
  }
  const Index d = dims ? *dims : max_col;
  data.features = SparseMatrix::FromTriplets(raw_labels.size(), d, entries);
  return data;
}

Dataset ParseLibsvmFile(const std::string& path, std::optional<Index> dims) {
  std::ifstream in = OpenIn(path);
  return ParseLibsvm(in, dims);
}

void WriteLibsvm(std::ostream& out, const Dataset& data) {
  data.Validate();
  for (Index i = 0; i < data.n_samples(); ++i) {
    out << (data.labels[i] > 0.0 ? "+1" : "-1");
    const auto cols = data.features.row_cols(i);
    const auto vals = data.features.row_values(i);
    for (Index e = 0; e < cols.size(); ++e) {
      out << ' ' << cols[e] + 1 << ':' << FormatDouble(vals[e]);
    }
    out << '\n';
  }
}

void WriteGlp(std::ostream& out, const GlpInstance& p) {
  std::vector<std::string> tokens;
  tokens.reserve(p.n_cols());
  for (const CoordSpec& s : p.coords()) tokens.push_back(SpecToken(s));
  out << "glp " << p.n_rows() << ' ' << p.n_cols() << ' ' << p.a().nnz() << ' '
      << FormatDouble(p.sigma()) << '\n';
  out << 'c';
  for (double v : p.c()) out << ' ' << FormatDouble(v);
  out << "\nb";
  for (double v : p.b()) out << ' ' << FormatDouble(v);
  out << "\nspec";
  for (const std::string& t : tokens) out << ' ' << t;
  out << '\n';
  for (Index i = 0; i < p.n_rows(); ++i) {
    const auto cols = p.a().row_cols(i);
    const auto vals = p.a().row_values(i);
    for (Index e = 0; e < cols.size(); ++e) {
      out << i << ' ' << cols[e] << ' ' << FormatDouble(vals[e]) << '\n';
    }
  }
}

void WriteGlpFile(const std::string& path, const GlpInstance& p) {
  std::ofstream out = OpenOut(path);
  WriteGlp(out, p);
  if (!out) throw Error("write to '" + path + "' failed");
}

GlpInstance ReadGlp(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!NextLine(in, line, line_no)) throw ParseError("empty GLP file", line_no);
  const auto head = Split(line);
  if (head.size() != 5 || head[0] != "glp") {
    throw ParseError("header must read 'glp <n> <d> <nnz> <sigma>'", line_no);
  }
  const Index n = ParseCount(head[1], line_no, "row count");
  const Index d = ParseCount(head[2], line_no, "column count");
  const Index nnz = ParseCount(head[3], line_no, "nonzero count");
  const double sigma = ParseReal(head[4], line_no, "sigma");

  std::vector<double> c = ParseVectorLine(in, line_no, "c", d);
  std::vector<double> b = ParseVectorLine(in, line_no, "b", n);
  if (!NextLine(in, line, line_no)) throw ParseError("missing 'spec' line", line_no);
  const auto spec = Split(line);
  if (spec.empty() || spec[0] != "spec") throw ParseError("expected 'spec' line", line_no);
  if (spec.size() - 1 != d) {
    throw ParseError("'spec' line has " + std::to_string(spec.size() - 1) +
                         " tokens, expected " + std::to_string(d),
                     line_no);
  }
  std::vector<CoordSpec> coords(d);
  for (Index i = 0; i < d; ++i) coords[i] = ParseSpecToken(spec[i + 1], line_no);

  std::vector<Triplet> entries;
  entries.reserve(nnz);
  while (NextLine(in, line, line_no)) {
    const auto toks = Split(line);
    if (toks.size() != 3) throw ParseError("entry lines must read 'row col value'", line_no);
    const Index r = ParseCount(toks[0], line_no, "row index");
    const Index col = ParseCount(toks[1], line_no, "column index");
    if (r >= n || col >= d) {
      throw ParseError("entry (" + std::to_string(r) + ", " + std::to_string(col) +
                           ") lies outside the " + std::to_string(n) + " x " +
                           std::to_string(d) + " matrix",
                       line_no);
    }
    entries.push_back({r, col, ParseReal(toks[2], line_no, "entry value")});
    if (entries.size() > nnz) throw ParseError("more entries than the header states", line_no);
  }
  if (entries.size() != nnz) {
    throw ParseError("header states " + std::to_string(nnz) + " entries, file has " +
                         std::to_string(entries.size()),
                     line_no);
  }
  SparseMatrix a = SparseMatrix::FromTriplets(n, d, entries);
  if (a.nnz() != nnz) throw ParseError("duplicate or zero entries in the matrix", line_no);
  GlpInstance p(std::move(a), std::move(b), std::move(c), std::move(coords));
  if (p.sigma() != sigma) {
    throw ParseError("header sigma " + FormatDouble(sigma) +
                         " disagrees with the coordinate specs (" + FormatDouble(p.sigma()) +
                         ")",
                     1);
  }
  return p;
}

GlpInstance ReadGlpFile(const std::string& path) {
  std::ifstream in = OpenIn(path);
  return ReadGlp(in);
}

void CsvTraceWriter::WriteHeader() { *out_ << kCsvHeader << '\n'; }

void CsvTraceWriter::Write(const MetricsRecord& rec) {
  *out_ << rec.epoch << ',' << rec.iter << ',' << FormatDouble(rec.data_passes) << ','
        << FormatDouble(rec.wall_ms) << ',' << FormatDouble(rec.lp_metric) << ','
        << FormatDouble(rec.primal_obj) << ',' << FormatDouble(rec.infeas) << '\n';
}

}  // namespace clvr
