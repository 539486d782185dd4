#include "skewgibbs/chain_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "skewgibbs/simstudy.hpp"

namespace skewgibbs::io {

namespace fs = std::filesystem;

std::vector<std::string> chain_header(const model::DeltaLayout& layout, bool has_varphi) {
  const Index n = layout.n();
  std::vector<std::string> h{"draw"};
  for (Index i = 0; i < n; ++i) h.push_back("mu[" + std::to_string(i + 1) + "]");
  for (const auto& [i, j] : layout.entries()) {
    h.push_back("delta[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]");
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      h.push_back("omega[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]");
    }
  }
  if (has_varphi) h.push_back("varphi");
  return h;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void atomic_write(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("rename to " + path.string() + " failed: " + ec.message());
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

double parse_double(const std::string& s, std::size_t line) {
  double x = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last) throw FormatError(line, "not a number: '" + s + "'");
  return x;
}

void join_row(std::string& out, const Vector& v) {
  for (Index k = 0; k < v.size(); ++k) {
    if (k) out += ',';
    out += format_double(v(k));
  }
}

}  // namespace

void write_chain(const fs::path& path, const gibbs::DrawBuffer& draws,
                 const model::DeltaLayout& layout) {
  const bool has_varphi = !draws.varphi.empty();
  if (has_varphi && draws.varphi.size() != draws.size()) {
    throw DimensionMismatch("write_chain: varphi count differs from draw count");
  }
  std::string out;
  const auto header = chain_header(layout, has_varphi);
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k) out += ',';
    out += header[k];
  }
  out += '\n';
  for (std::size_t d = 0; d < draws.size(); ++d) {
    const auto flat = gibbs::flatten_draw(
        draws.mu[d], draws.delta[d], draws.omega[d], layout,
        has_varphi ? std::optional<double>(draws.varphi[d]) : std::nullopt);
    out += std::to_string(d + 1);
    out += ',';
    join_row(out, flat);
    out += '\n';
  }
  atomic_write(path, out);
}

ChainTable read_chain(const fs::path& path) {
  const auto lines = lines_of(read_text(path));
  if (lines.empty()) throw FormatError(1, "empty chain file");
  const auto header = split_line(lines[0]);
  if (header.empty() || header[0] != "draw") throw FormatError(1, "first column must be 'draw'");

  Index n = 0;
  while (static_cast<std::size_t>(n + 1) < header.size() &&
         header[static_cast<std::size_t>(n + 1)].rfind("mu[", 0) == 0) {
    ++n;
  }
  if (n == 0) throw FormatError(1, "no mu columns");
  const bool full = std::find(header.begin(), header.end(), "delta[1][2]") != header.end();
  const bool has_varphi = header.back() == "varphi";
  ChainTable table{model::DeltaLayout(full ? model::DeltaLayout::Shape::Full
                                           : model::DeltaLayout::Shape::LowerTriangular,
                                      n),
                   has_varphi,
                   {}};
  if (chain_header(table.layout, has_varphi) != header) {
    throw FormatError(1, "header does not match any chain layout");
  }

  const Index p = table.layout.size();
  for (std::size_t l = 1; l < lines.size(); ++l) {
    if (lines[l].empty()) continue;
    const auto cells = split_line(lines[l]);
    if (cells.size() != header.size()) {
      throw FormatError(l + 1, "expected " + std::to_string(header.size()) + " fields, got " +
                                   std::to_string(cells.size()));
    }
    Vector row(static_cast<Index>(cells.size()) - 1);
    for (std::size_t k = 1; k < cells.size(); ++k) {
      row(static_cast<Index>(k) - 1) = parse_double(cells[k], l + 1);
    }
    table.draws.mu.push_back(row.head(n));
    table.draws.delta.push_back(table.layout.to_matrix(row.segment(n, p)));
    Matrix omega(n, n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) omega(i, j) = row(n + p + i * n + j);
    }
    table.draws.omega.push_back(omega);
    if (has_varphi) table.draws.varphi.push_back(row(row.size() - 1));
  }
  return table;
}

void write_matrix_csv(const fs::path& path, const Matrix& m) {
  std::string out;
  for (Index i = 0; i < m.rows(); ++i) {
    join_row(out, m.row(i).transpose());
    out += '\n';
  }
  atomic_write(path, out);
}

Matrix read_matrix_csv(const fs::path& path) {
  const auto lines = lines_of(read_text(path));
  std::vector<std::vector<double>> rows;
  for (std::size_t l = 0; l < lines.size(); ++l) {
    if (lines[l].empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split_line(lines[l])) row.push_back(parse_double(cell, l + 1));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw FormatError(l + 1, "ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError(1, "empty matrix file");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

void write_summary_csv(const fs::path& path, const gibbs::ChainSummary& s,
                       const model::DeltaLayout& layout) {
  const bool has_varphi = s.varphi_mean.has_value();
  const auto header = chain_header(layout, has_varphi);
  const Vector mean = gibbs::flatten_draw(s.mu_mean, s.delta_mean, s.omega_mean, layout,
                                          s.varphi_mean);
  std::string out = "parameter,mean,q025,q500,q975\n";
  for (Index k = 0; k < mean.size(); ++k) {
    out += header[static_cast<std::size_t>(k) + 1];
    out += ',' + format_double(mean(k));
    if (s.quantiles.q500.size() == mean.size()) {
      out += ',' + format_double(s.quantiles.q025(k)) + ',' + format_double(s.quantiles.q500(k)) +
             ',' + format_double(s.quantiles.q975(k));
    } else {
      out += ",,,";
    }
    out += '\n';
  }
  atomic_write(path, out);
}

void write_posterior_means(const fs::path& dir, const gibbs::ChainSummary& s,
                           const std::string& prefix) {
  write_matrix_csv(dir / (prefix + "posterior_mean_mu.csv"), s.mu_mean);
  write_matrix_csv(dir / (prefix + "posterior_mean_delta.csv"), s.delta_mean);
  write_matrix_csv(dir / (prefix + "posterior_mean_omega.csv"), s.omega_mean);
  if (s.varphi_mean) {
    write_matrix_csv(dir / (prefix + "posterior_mean_varphi.csv"),
                     Matrix::Constant(1, 1, *s.varphi_mean));
  }
}

void write_study_jobs_csv(const fs::path& path, const std::vector<simstudy::JobResult>& jobs) {
  std::string out = "design,variant,rep,delta_loss,omega_loss,seed,stream,iterations,seconds,status\n";
  for (const auto& j : jobs) {
    out += std::string(simstudy::to_string(j.design)) + ',' +
           std::string(model::to_string(j.variant)) + ',' + std::to_string(j.rep + 1) + ',' +
           (j.ok ? format_double(j.delta_loss) : "") + ',' +
           (j.ok ? format_double(j.omega_loss) : "") + ',' + std::to_string(j.seed) + ',' +
           std::to_string(j.stream) + ',' + std::to_string(j.iterations) + ',' +
           format_double(j.seconds) + ',' + (j.ok ? "ok" : "failed") + '\n';
  }
  atomic_write(path, out);
}

void write_study_summary_csv(const fs::path& path,
                             const std::vector<simstudy::CellSummary>& cells) {
  std::string out =
      "design,variant,reps_ok,median_delta_loss,se_delta_loss,median_omega_loss,se_omega_loss\n";
  for (const auto& c : cells) {
    out += std::string(simstudy::to_string(c.design)) + ',' +
           std::string(model::to_string(c.variant)) + ',' + std::to_string(c.reps_ok) + ',' +
           format_double(c.median_delta_loss) + ',' + format_double(c.se_delta_loss) + ',' +
           format_double(c.median_omega_loss) + ',' + format_double(c.se_omega_loss) + '\n';
  }
  atomic_write(path, out);
}

}  // namespace skewgibbs::io
