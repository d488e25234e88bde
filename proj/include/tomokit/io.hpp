#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "tomokit/core.hpp"
#include "tomokit/tomography.hpp"

namespace tomokit {

/// Parse failure in an external file; carries the 1-based line number.
class parse_error : public error {
 public:
  parse_error(const std::string& what, int line)
      : error(what + " (line " + std::to_string(line) + ")"), line_number(line) {}
  int line_number;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// Writes content to the destination atomically (temp file + rename).
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// phasegrid v1: line-oriented text format.
//   # phasegrid v1
//   q_min q_max n_q
//   p_min p_max n_p
//   n_q lines of n_p space-separated values (q is the slow index)

inline std::string write_phasegrid_string(const PhaseGrid& g) {
  std::ostringstream out;
  out << "# phasegrid v1\n";
  out << detail::format_double(g.spec().q_min) << ' ' << detail::format_double(g.spec().q_max)
      << ' ' << g.n_q() << '\n';
  out << detail::format_double(g.spec().p_min) << ' ' << detail::format_double(g.spec().p_max)
      << ' ' << g.n_p() << '\n';
  for (int i = 0; i < g.n_q(); ++i) {
    for (int j = 0; j < g.n_p(); ++j) {
      if (j) out << ' ';
      out << detail::format_double(g.values()(i, j));
    }
    out << '\n';
  }
  return out.str();
}

inline void write_phasegrid(const std::filesystem::path& path, const PhaseGrid& g) {
  atomic_write(path, write_phasegrid_string(g));
}

inline PhaseGrid read_phasegrid(const std::filesystem::path& path,
                                GridKind kind = GridKind::density) {
  std::ifstream in(path);
  if (!in) throw error("cannot open " + path.string());
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw parse_error("empty file", 1);
  ++lineno;
  if (line.rfind("# phasegrid v1", 0) != 0)
    throw parse_error("missing '# phasegrid v1' header", lineno);

  GridSpec spec;
  {
    if (!std::getline(in, line)) throw parse_error("missing q axis line", lineno + 1);
    ++lineno;
    std::istringstream ss(line);
    if (!(ss >> spec.q_min >> spec.q_max >> spec.n_q))
      throw parse_error("bad q axis line", lineno);
  }
  {
    if (!std::getline(in, line)) throw parse_error("missing p axis line", lineno + 1);
    ++lineno;
    std::istringstream ss(line);
    if (!(ss >> spec.p_min >> spec.p_max >> spec.n_p))
      throw parse_error("bad p axis line", lineno);
  }
  if (spec.n_q < 2 || spec.n_p < 2) throw parse_error("sample counts must be >= 2", lineno);

  Eigen::MatrixXd v(spec.n_q, spec.n_p);
  for (int i = 0; i < spec.n_q; ++i) {
    if (!std::getline(in, line)) throw parse_error("missing value row", lineno + 1);
    ++lineno;
    std::istringstream ss(line);
    for (int j = 0; j < spec.n_p; ++j)
      if (!(ss >> v(i, j))) throw parse_error("bad value row", lineno);
  }
  return PhaseGrid(spec, std::move(v), kind);
}

// ---------------------------------------------------------------------------
// Tomogram CSV: header "mu,nu,x,value", frames grouped contiguously.

inline std::string write_tomogram_string(const SampledTomogram& t) {
  std::ostringstream out;
  out << "mu,nu,x,value\n";
  for (size_t m = 0; m < t.frames.size(); ++m) {
    std::string mu = detail::format_double(t.frames[m].mu);
    std::string nu = detail::format_double(t.frames[m].nu);
    for (int k = 0; k < t.n_x; ++k)
      out << mu << ',' << nu << ',' << detail::format_double(t.x_at(k)) << ','
          << detail::format_double(t.values(static_cast<int>(m), k)) << '\n';
  }
  return out.str();
}

inline void write_tomogram(const std::filesystem::path& path, const SampledTomogram& t) {
  atomic_write(path, write_tomogram_string(t));
}

/// Reads a tomogram CSV. Every frame block must share the same uniform X
/// axis (the format the writer produces).
inline SampledTomogram read_tomogram(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw error("cannot open " + path.string());
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw parse_error("empty file", 1);
  ++lineno;
  if (line != "mu,nu,x,value") throw parse_error("missing 'mu,nu,x,value' header", lineno);

  std::vector<Frame> frames;
  std::vector<std::vector<double>> rows;
  std::vector<double> xs;
  bool first_block = true;
  double cur_mu = 0, cur_nu = 0;
  size_t col = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    double mu, nu, x, value;
    char c1, c2, c3;
    if (!(ss >> mu >> c1 >> nu >> c2 >> x >> c3 >> value) || c1 != ',' || c2 != ',' || c3 != ',')
      throw parse_error("bad CSV row", lineno);
    bool new_block = frames.empty() || mu != cur_mu || nu != cur_nu;
    if (new_block) {
      if (!frames.empty() && col != xs.size())
        throw parse_error("frame block ended early", lineno);
      if (mu == 0.0 && nu == 0.0) throw parse_error("degenerate frame (0, 0)", lineno);
      frames.emplace_back(mu, nu);
      rows.emplace_back();
      cur_mu = mu;
      cur_nu = nu;
      if (!rows[0].empty()) first_block = false;
      col = 0;
    }
    if (first_block) {
      xs.push_back(x);
    } else {
      if (col >= xs.size() || std::abs(x - xs[col]) > 1e-9 * (1.0 + std::abs(x)))
        throw parse_error("frame blocks disagree on the X axis", lineno);
    }
    rows.back().push_back(value);
    ++col;
  }
  if (frames.empty()) throw parse_error("no data rows", lineno);
  int n_x = static_cast<int>(xs.size());
  if (n_x < 2) throw parse_error("need at least 2 X samples", lineno);
  for (size_t m = 0; m < rows.size(); ++m)
    if (static_cast<int>(rows[m].size()) != n_x)
      throw parse_error("ragged frame blocks", lineno);
  double dx0 = xs[1] - xs[0];
  for (int k = 1; k + 1 < n_x; ++k)
    if (std::abs(xs[k + 1] - xs[k] - dx0) > 1e-9 * (1.0 + std::abs(dx0)))
      throw parse_error("X axis is not uniform", lineno);

  Eigen::MatrixXd values(static_cast<int>(frames.size()), n_x);
  for (size_t m = 0; m < rows.size(); ++m)
    for (int k = 0; k < n_x; ++k) values(static_cast<int>(m), k) = rows[m][k];
  return SampledTomogram{std::move(frames), xs.front(), xs.back(), n_x, std::move(values)};
}

/// Frame list file: one "mu nu" pair per line, '#' comments allowed.
inline std::vector<Frame> read_frames(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw error("cannot open " + path.string());
  std::vector<Frame> frames;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    double mu, nu;
    if (!(ss >> mu >> nu)) throw parse_error("frame line needs two numbers", lineno);
    std::string rest;
    if (ss >> rest) throw parse_error("trailing tokens on frame line", lineno);
    if (mu == 0.0 && nu == 0.0) throw parse_error("degenerate frame (0, 0)", lineno);
    frames.emplace_back(mu, nu);
  }
  if (frames.empty()) throw parse_error("no frames in file", lineno == 0 ? 1 : lineno);
  return frames;
}

/// FNV-1a digest of a byte string, for deterministic input fingerprints.
inline std::string fnv1a_hex(const std::string& bytes) {
  unsigned long long h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", h);
  return buf;
}

}  // namespace tomokit
