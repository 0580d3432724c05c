#pragma once

// Text format for affine fixed-point problems, plus CSV trace output.
//
// A problem file is whitespace-separated tokens with '#' comments:
//   n 2
//   M
//   0.5  0.0
//   0.0 -0.5
//   b 1.0 1.0
//   x0 0.0 0.0
// The dimension comes first; the M, b, and x0 sections follow in any order,
// x0 defaulting to zero when absent. M entries mirrored within 1e-12 of the
// largest magnitude are averaged (recorded as a warning); anything less
// symmetric is rejected.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "solvers.hpp"

namespace raa {

class ProblemFormatError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProblemSpec {
  SymmetricMatrix M;
  Vector b;
  Vector x0;
  std::vector<std::string> warnings;
};

namespace detail {

struct Token {
  std::string text;
  std::size_t line = 0;
};

inline std::vector<Token> tokenize_problem(std::istream& in) {
  std::vector<Token> out;
  std::string line;
  std::size_t ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string tok;
    while (fields >> tok) out.push_back({tok, ln});
  }
  return out;
}

[[noreturn]] inline void problem_error(const std::string& name, std::size_t line,
                                       const std::string& message) {
  throw ProblemFormatError(name + ":" + std::to_string(line) + ": " + message);
}

inline double number_token(const std::vector<Token>& toks, std::size_t& pos,
                           const std::string& name, const char* context) {
  if (pos >= toks.size())
    problem_error(name, toks.empty() ? 0 : toks.back().line,
                  std::string("unexpected end of file while reading ") + context);
  const Token& tok = toks[pos];
  char* end = nullptr;
  const double v = std::strtod(tok.text.c_str(), &end);
  if (end != tok.text.c_str() + tok.text.size())
    problem_error(name, tok.line, "bad number '" + tok.text + "' in " + context);
  if (!std::isfinite(v))
    problem_error(name, tok.line, "non-finite value '" + tok.text + "' in " + context);
  ++pos;
  return v;
}

}  // namespace detail

inline ProblemSpec parse_problem(std::istream& in, const std::string& name) {
  const std::vector<detail::Token> toks = detail::tokenize_problem(in);
  if (toks.empty()) detail::problem_error(name, 1, "empty problem file");
  if (toks[0].text != "n")
    detail::problem_error(name, toks[0].line, "the dimension directive 'n' must come first");

  std::size_t pos = 1;
  if (pos >= toks.size())
    detail::problem_error(name, toks[0].line, "missing dimension after 'n'");
  char* end = nullptr;
  const long dim_raw = std::strtol(toks[pos].text.c_str(), &end, 10);
  if (end != toks[pos].text.c_str() + toks[pos].text.size() || dim_raw < 1 ||
      dim_raw > 1000)
    detail::problem_error(name, toks[pos].line,
                          "dimension must be an integer in [1, 1000], got '" +
                              toks[pos].text + "'");
  const std::size_t n = static_cast<std::size_t>(dim_raw);
  ++pos;

  std::vector<double> entries;
  Vector b, x0;
  bool saw_m = false, saw_b = false, saw_x0 = false;
  std::size_t m_line = 0;

  while (pos < toks.size()) {
    const detail::Token& head = toks[pos];
    if (head.text == "M") {
      if (saw_m) detail::problem_error(name, head.line, "duplicate 'M' section");
      saw_m = true;
      m_line = head.line;
      ++pos;
      entries.resize(n * n);
      for (std::size_t i = 0; i < n * n; ++i)
        entries[i] = detail::number_token(toks, pos, name, "the M section");
    } else if (head.text == "b") {
      if (saw_b) detail::problem_error(name, head.line, "duplicate 'b' section");
      saw_b = true;
      ++pos;
      b.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        b[i] = detail::number_token(toks, pos, name, "the b section");
    } else if (head.text == "x0") {
      if (saw_x0) detail::problem_error(name, head.line, "duplicate 'x0' section");
      saw_x0 = true;
      ++pos;
      x0.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        x0[i] = detail::number_token(toks, pos, name, "the x0 section");
    } else {
      detail::problem_error(name, head.line, "unknown directive '" + head.text + "'");
    }
  }
  if (!saw_m) detail::problem_error(name, toks.back().line, "missing 'M' section");
  if (!saw_b) detail::problem_error(name, toks.back().line, "missing 'b' section");
  if (!saw_x0) x0.assign(n, 0.0);

  double scale = 1.0;
  for (double e : entries) scale = std::max(scale, std::abs(e));
  double worst = 0.0;
  std::size_t wi = 0, wj = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double gap = std::abs(entries[i * n + j] - entries[j * n + i]);
      if (gap > worst) {
        worst = gap;
        wi = i;
        wj = j;
      }
    }
  if (worst > 1e-12 * scale)
    detail::problem_error(name, m_line,
                          "M is not symmetric: entries (" + std::to_string(wi) + "," +
                              std::to_string(wj) + ") and (" + std::to_string(wj) +
                              "," + std::to_string(wi) + ") differ by " +
                              detail::format_double(worst));

  ProblemSpec spec{SymmetricMatrix::symmetrized(n, entries), std::move(b),
                   std::move(x0), {}};
  if (worst > 0.0)
    spec.warnings.push_back("symmetrized M: largest mirrored difference " +
                            detail::format_double(worst));
  return spec;
}

inline ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem file '" + path + "'");
  return parse_problem(in, path);
}

// One row per recorded iterate: step, residual norm, and the mixing
// coefficients produced at that step (empty for plain steps, semicolon
// separated when a step solves for several).
inline void write_trace_csv(const IterationTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace file '" + path + "' for writing");
  std::map<std::size_t, std::string> beta_column;
  for (const BetaRecord& rec : trace.betas) {
    std::string& cell = beta_column[rec.step];
    if (!cell.empty()) cell += ';';
    cell += detail::format_double(rec.value);
  }
  out << "k,residual_norm,beta\n";
  for (std::size_t k = 0; k < trace.residual_norms.size(); ++k) {
    out << k << ',' << detail::format_double(trace.residual_norms[k]) << ',';
    const auto it = beta_column.find(k);
    if (it != beta_column.end()) out << it->second;
    out << '\n';
  }
  if (!out.flush()) throw std::runtime_error("write to trace file '" + path + "' failed");
}

}  // namespace raa
