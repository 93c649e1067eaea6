#pragma once

// Embedding files (CSV or JSON), plan files (JSON) and SVG heatmaps of plans.
//
// CSV embeddings:  header `label,v0,v1,...,v{d-1}`, then one `label,x0,...` row
//                  per vector. Labels may not contain commas.
// JSON embeddings: [{"label": "...", "vector": [..]}, ...]

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "got/core.hpp"
#include "got/error.hpp"
#include "got/matrix.hpp"

namespace got::io {

enum class FileFormat { csv, json };

struct LabeledEmbeddings {
  std::vector<std::string> labels;
  EmbeddingSet set;
};

inline std::optional<FileFormat> parse_format(std::string_view s) {
  if (s == "csv") return FileFormat::csv;
  if (s == "json") return FileFormat::json;
  return std::nullopt;
}

/// csv unless the path ends in ".json".
inline FileFormat format_from_path(std::string_view path) {
  return path.size() >= 5 && path.substr(path.size() - 5) == ".json" ? FileFormat::json
                                                                      : FileFormat::csv;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  got::detail::require(static_cast<bool>(in), "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  got::detail::require(static_cast<bool>(out), "cannot write '" + path + "'");
  out << content;
  out.flush();
  got::detail::require(static_cast<bool>(out), "failed writing '" + path + "'");
}

// Applies the shared file invariants and builds the set, naming the
// offending record when a vector is rejected.
inline LabeledEmbeddings assemble(std::vector<std::string> labels,
                                  std::vector<std::vector<double>> vectors,
                                  const std::vector<std::string>& where) {
  got::detail::require(!vectors.empty(), "embedding file has no records");
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < labels.size(); ++i)
    got::detail::require(seen.insert(labels[i]).second,
                         where[i] + ": duplicate label '" + labels[i] + "'");
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    double s = 0.0;
    for (double v : vectors[i]) s += v * v;
    got::detail::require(s > 0.0, where[i] + ": vector '" + labels[i] + "' has zero norm");
  }
  return LabeledEmbeddings{std::move(labels), EmbeddingSet(vectors)};
}

}  // namespace detail

inline LabeledEmbeddings parse_embeddings_csv(std::string_view text) {
  std::vector<std::string> labels, where;
  std::vector<std::vector<double>> vectors;
  std::size_t dim = 0;
  bool header_seen = false;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = detail::trim(text.substr(start, nl - start));
    start = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split(line, ',');
    const std::string loc = "line " + std::to_string(line_no);
    if (!header_seen) {
      got::detail::require(fields.size() >= 2 && fields[0] == "label",
                           loc + ": header must be label,v0,...,v{d-1}");
      for (std::size_t k = 1; k < fields.size(); ++k)
        got::detail::require(fields[k] == "v" + std::to_string(k - 1),
                             loc + ": header column " + std::to_string(k) + " should be v" +
                                 std::to_string(k - 1));
      dim = fields.size() - 1;
      header_seen = true;
      continue;
    }
    got::detail::require(fields.size() == dim + 1,
                         loc + ": expected " + std::to_string(dim) + " values, got " +
                             std::to_string(fields.size() - 1));
    got::detail::require(!fields[0].empty(), loc + ": empty label");
    std::vector<double> v(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      const auto parsed = detail::parse_double(fields[k + 1]);
      got::detail::require(parsed && std::isfinite(*parsed),
                           loc + ": cannot parse value '" + std::string(fields[k + 1]) + "'");
      v[k] = *parsed;
    }
    labels.emplace_back(fields[0]);
    vectors.push_back(std::move(v));
    where.push_back(loc);
  }
  got::detail::require(header_seen, "embedding CSV is empty");
  return detail::assemble(std::move(labels), std::move(vectors), where);
}

inline LabeledEmbeddings parse_embeddings_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("embedding JSON: ") + e.what());
  }
  got::detail::require(doc.is_array(), "embedding JSON: top level must be an array");
  std::vector<std::string> labels, where;
  std::vector<std::vector<double>> vectors;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& rec = doc[i];
    const std::string loc = "record " + std::to_string(i);
    got::detail::require(rec.is_object() && rec.contains("label") && rec["label"].is_string() &&
                             rec.contains("vector") && rec["vector"].is_array(),
                         loc + ": expected {\"label\": string, \"vector\": [numbers]}");
    std::vector<double> v;
    for (const auto& x : rec["vector"]) {
      got::detail::require(x.is_number(), loc + ": vector entries must be numbers");
      v.push_back(x.get<double>());
    }
    got::detail::require(!v.empty(), loc + ": empty vector");
    if (!vectors.empty())
      got::detail::require(v.size() == vectors.front().size(),
                           loc + ": expected " + std::to_string(vectors.front().size()) +
                               " values, got " + std::to_string(v.size()));
    labels.push_back(rec["label"].get<std::string>());
    vectors.push_back(std::move(v));
    where.push_back(loc);
  }
  return detail::assemble(std::move(labels), std::move(vectors), where);
}

inline LabeledEmbeddings load_embeddings(const std::string& path, FileFormat format) {
  const std::string text = detail::read_file(path);
  try {
    return format == FileFormat::csv ? parse_embeddings_csv(text) : parse_embeddings_json(text);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

/// Shortest decimal that parses back to the same double.
inline std::string format_exact(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string embeddings_to_csv(const std::vector<std::string>& labels,
                                     const EmbeddingSet& set) {
  got::detail::require(labels.size() == set.count(), "embeddings_to_csv: label count mismatch");
  std::string out = "label";
  for (std::size_t k = 0; k < set.dim(); ++k) out += ",v" + std::to_string(k);
  out += '\n';
  for (std::size_t i = 0; i < set.count(); ++i) {
    out += labels[i];
    for (double v : set.vector(i)) out += ',' + format_exact(v);
    out += '\n';
  }
  return out;
}

inline std::string embeddings_to_json(const std::vector<std::string>& labels,
                                      const EmbeddingSet& set) {
  got::detail::require(labels.size() == set.count(), "embeddings_to_json: label count mismatch");
  nlohmann::json doc = nlohmann::json::array();
  for (std::size_t i = 0; i < set.count(); ++i) {
    auto v = set.vector(i);
    doc.push_back({{"label", labels[i]}, {"vector", std::vector<double>(v.begin(), v.end())}});
  }
  return doc.dump(2) + "\n";
}

/// Serialized transport plan with labels and provenance.
struct PlanFile {
  std::string solver;  // "wd", "gwd", "got"
  SolverConfig config;
  double distance = 0.0;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  Matrix entries;
  std::vector<double> row_marginal;
  std::vector<double> col_marginal;
  /// Second plan of an unshared fused solve.
  std::optional<Matrix> entries_gwd;

  TransportPlan plan() const {
    return TransportPlan(entries, MarginalWeights(row_marginal), MarginalWeights(col_marginal));
  }
};

inline PlanFile make_plan_file(std::string solver, const SolverConfig& config, double distance,
                               std::vector<std::string> row_labels,
                               std::vector<std::string> col_labels, const TransportPlan& plan) {
  got::detail::require(row_labels.size() == plan.rows() && col_labels.size() == plan.cols(),
                       "make_plan_file: label counts do not match plan shape");
  auto rm = plan.row_marginal().values();
  auto cm = plan.col_marginal().values();
  return PlanFile{std::move(solver),
                  config,
                  distance,
                  std::move(row_labels),
                  std::move(col_labels),
                  plan.entries(),
                  {rm.begin(), rm.end()},
                  {cm.begin(), cm.end()},
                  std::nullopt};
}

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& j, const char* what) {
  got::detail::require(j.is_array() && !j.empty(), std::string(what) + " must be a nonempty array");
  const std::size_t cols = j[0].size();
  Matrix m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    got::detail::require(j[i].is_array() && j[i].size() == cols,
                         std::string(what) + ": row " + std::to_string(i) + " is ragged");
    for (std::size_t k = 0; k < cols; ++k) {
      got::detail::require(j[i][k].is_number(), std::string(what) + ": non-numeric entry");
      m(i, k) = j[i][k].get<double>();
    }
  }
  return m;
}

}  // namespace detail

inline nlohmann::json config_to_json(const SolverConfig& c) {
  return {{"beta", c.beta},
          {"outer_iters", c.outer_iters},
          {"inner_iters", c.inner_iters},
          {"lambda", c.lambda},
          {"tau", c.tau},
          {"threshold_graphs", c.threshold_graphs},
          {"mode", to_string(c.mode)},
          {"marginal_tol", c.marginal_tol},
          {"convergence_tol", c.convergence_tol}};
}

inline SolverConfig config_from_json(const nlohmann::json& j) {
  SolverConfig c;
  c.beta = j.at("beta").get<double>();
  c.outer_iters = j.at("outer_iters").get<int>();
  c.inner_iters = j.at("inner_iters").get<int>();
  c.lambda = j.at("lambda").get<double>();
  c.tau = j.at("tau").get<double>();
  c.threshold_graphs = j.at("threshold_graphs").get<bool>();
  const auto mode = j.at("mode").get<std::string>();
  got::detail::require(mode == "shared" || mode == "unshared", "config: unknown mode '" + mode + "'");
  c.mode = mode == "shared" ? SolveMode::shared : SolveMode::unshared;
  c.marginal_tol = j.at("marginal_tol").get<double>();
  c.convergence_tol = j.at("convergence_tol").get<double>();
  c.validate();
  return c;
}

inline std::string plan_file_to_json(const PlanFile& f) {
  nlohmann::json doc = {{"solver", f.solver},
                        {"config", config_to_json(f.config)},
                        {"distance", f.distance},
                        {"row_labels", f.row_labels},
                        {"col_labels", f.col_labels},
                        {"row_marginal", f.row_marginal},
                        {"col_marginal", f.col_marginal},
                        {"entries", detail::matrix_to_json(f.entries)}};
  if (f.entries_gwd) doc["entries_gwd"] = detail::matrix_to_json(*f.entries_gwd);
  return doc.dump(2) + "\n";
}

/// Parses a plan file and checks it against the transport-plan invariants at
/// the recorded marginal tolerance.
inline PlanFile plan_file_from_json(std::string_view text) {
  PlanFile f;
  try {
    const auto doc = nlohmann::json::parse(text);
    f.solver = doc.at("solver").get<std::string>();
    f.config = config_from_json(doc.at("config"));
    f.distance = doc.at("distance").get<double>();
    f.row_labels = doc.at("row_labels").get<std::vector<std::string>>();
    f.col_labels = doc.at("col_labels").get<std::vector<std::string>>();
    f.row_marginal = doc.at("row_marginal").get<std::vector<double>>();
    f.col_marginal = doc.at("col_marginal").get<std::vector<double>>();
    f.entries = detail::matrix_from_json(doc.at("entries"), "entries");
    if (doc.contains("entries_gwd"))
      f.entries_gwd = detail::matrix_from_json(doc.at("entries_gwd"), "entries_gwd");
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("plan file: ") + e.what());
  }
  got::detail::require(f.row_labels.size() == f.entries.rows() &&
                           f.col_labels.size() == f.entries.cols(),
                       "plan file: label counts do not match entries");
  f.plan().validate(f.config.marginal_tol);
  if (f.entries_gwd)
    TransportPlan(*f.entries_gwd, MarginalWeights(f.row_marginal), MarginalWeights(f.col_marginal))
        .validate(f.config.marginal_tol);
  return f;
}

inline void write_plan_file(const PlanFile& f, const std::string& path) {
  detail::write_file(path, plan_file_to_json(f));
}

inline PlanFile read_plan_file(const std::string& path) {
  return plan_file_from_json(detail::read_file(path));
}

// ---------------------------------------------------------------------------
// Heatmap

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

inline constexpr int kHeatmapCell = 24;

/// Shade of a cell with relative intensity s in [0, 1]: white at 0, black at 1.
inline int heatmap_gray(double s) {
  return static_cast<int>(std::lround(255.0 * (1.0 - std::clamp(s, 0.0, 1.0))));
}

/// Standalone SVG heatmap. Rows (x-domain) run down the vertical axis, columns
/// (y-domain) along the horizontal axis. Cells are shaded by T_ij / max T on a
/// linear white-to-black ramp and carry their exact value as a tooltip.
inline std::string heatmap_svg(const PlanFile& f) {
  const Matrix& t = f.entries;
  got::detail::require(!t.empty(), "heatmap: empty plan");
  got::detail::require(f.row_labels.size() == t.rows() && f.col_labels.size() == t.cols(),
                       "heatmap: label counts do not match plan shape");
  double peak = 0.0;
  for (double v : t.data()) peak = std::max(peak, v);

  std::size_t row_chars = 1, col_chars = 1;
  for (const auto& l : f.row_labels) row_chars = std::max(row_chars, l.size());
  for (const auto& l : f.col_labels) col_chars = std::max(col_chars, l.size());
  const int cell = kHeatmapCell;
  const int left = 12 + 7 * static_cast<int>(row_chars);
  const int top = 12 + 7 * static_cast<int>(col_chars);
  const int width = left + cell * static_cast<int>(t.cols()) + 8;
  const int height = top + cell * static_cast<int>(t.rows()) + 8;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<g font-family=\"monospace\" font-size=\"12\">\n";
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const int y = top + cell * static_cast<int>(i) + cell / 2 + 4;
    svg << "<text class=\"row-label\" x=\"" << left - 6 << "\" y=\"" << y
        << "\" text-anchor=\"end\">" << detail::xml_escape(f.row_labels[i]) << "</text>\n";
  }
  for (std::size_t j = 0; j < t.cols(); ++j) {
    const int x = left + cell * static_cast<int>(j) + cell / 2 + 4;
    svg << "<text class=\"col-label\" x=\"" << x << "\" y=\"" << top - 6
        << "\" transform=\"rotate(-90 " << x << ' ' << top - 6 << ")\">"
        << detail::xml_escape(f.col_labels[j]) << "</text>\n";
  }
  svg << "</g>\n<g stroke=\"#cccccc\" stroke-width=\"0.5\">\n";
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t j = 0; j < t.cols(); ++j) {
      const double v = t(i, j);
      const int g = heatmap_gray(peak > 0.0 ? v / peak : 0.0);
      svg << "<rect class=\"cell\" x=\"" << left + cell * static_cast<int>(j) << "\" y=\""
          << top + cell * static_cast<int>(i) << "\" width=\"" << cell << "\" height=\"" << cell
          << "\" fill=\"rgb(" << g << ',' << g << ',' << g << ")\"><title>"
          << detail::xml_escape(f.row_labels[i]) << " -&gt; " << detail::xml_escape(f.col_labels[j])
          << ": " << format_exact(v) << "</title></rect>\n";
    }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

inline void render_heatmap(const PlanFile& f, const std::string& path) {
  detail::write_file(path, heatmap_svg(f));
}

}  // namespace got::io
