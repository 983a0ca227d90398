#include "gaborboost/explain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gaborboost/errors.hpp"

namespace gaborboost {

namespace {

constexpr int kExplanationVersion = 1;

void sort_ranking(std::vector<RankedTerm>& terms) {
  std::stable_sort(terms.begin(), terms.end(),
                   [](const RankedTerm& a, const RankedTerm& b) { return a.importance > b.importance; });
}

ClassExplanation explain_class(const EbmModel& m, const std::string& class_name) {
  ClassExplanation c;
  c.class_name = class_name;
  c.intercept = m.intercept;
  for (std::size_t t = 0; t < m.shapes.size(); ++t) {
    const auto& s = m.shapes[t];
    const double imp = t < m.shape_importance.size() ? m.shape_importance[t] : 0.0;
    c.shapes.push_back({m.feature_names[s.feature], s.feature, m.bins[s.feature].cuts, s.scores, imp});
    if (imp > 0.0) {
      c.feature_ranking.push_back({m.feature_names[s.feature], imp});
      c.term_ranking.push_back({m.feature_names[s.feature], imp});
    }
  }
  for (std::size_t t = 0; t < m.pairs.size(); ++t) {
    const auto& p = m.pairs[t];
    PairGrid g;
    g.first = m.feature_names[p.first];
    g.second = m.feature_names[p.second];
    g.first_index = p.first;
    g.second_index = p.second;
    g.first_cuts = m.pair_bins[p.first].cuts;
    g.second_cuts = m.pair_bins[p.second].cuts;
    const std::size_t rows = m.pair_bins[p.first].n_bins(), cols = m.pair_bins[p.second].n_bins();
    for (std::size_t r = 0; r < rows; ++r) {
      g.scores.emplace_back(p.scores.begin() + static_cast<std::ptrdiff_t>(r * cols),
                            p.scores.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols));
    }
    g.importance = t < m.pair_importance.size() ? m.pair_importance[t] : 0.0;
    if (g.importance > 0.0) c.term_ranking.push_back({g.first + " x " + g.second, g.importance});
    c.pairs.push_back(std::move(g));
  }
  sort_ranking(c.feature_ranking);
  sort_ranking(c.term_ranking);
  return c;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string file_stem(const std::string& s) {
  std::string out;
  for (char ch : s) out += std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' ? ch : '_';
  return out.empty() ? "class" : out;
}

// Diverging blue-white-red colour for v in [-1, 1].
std::string diverging(double v) {
  v = std::clamp(v, -1.0, 1.0);
  const int fade = static_cast<int>(std::lround(255.0 * (1.0 - std::abs(v))));
  char buf[16];
  if (v >= 0) {
    std::snprintf(buf, sizeof buf, "#ff%02x%02x", fade, fade);
  } else {
    std::snprintf(buf, sizeof buf, "#%02x%02xff", fade, fade);
  }
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw Error(path.string() + ": write failed");
}

std::string bar_chart(const ClassExplanation& c) {
  const int bar_h = 18, label_w = 180, plot_w = 360, top = 30;
  const int height = top + bar_h * static_cast<int>(std::max<std::size_t>(c.term_ranking.size(), 1)) + 20;
  const double top_imp = c.term_ranking.empty() ? 1.0 : c.term_ranking.front().importance;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << label_w + plot_w + 80 << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<text x=\"10\" y=\"18\" font-weight=\"bold\">" << xml_escape(c.class_name) << " vs rest</text>\n";
  for (std::size_t i = 0; i < c.term_ranking.size(); ++i) {
    const auto& t = c.term_ranking[i];
    const int y = top + bar_h * static_cast<int>(i);
    const double w = plot_w * t.importance / top_imp;
    svg << "<text x=\"" << label_w - 6 << "\" y=\"" << y + 13 << "\" text-anchor=\"end\">" << xml_escape(t.name)
        << "</text>";
    svg << "<rect x=\"" << label_w << "\" y=\"" << y + 2 << "\" width=\"" << w << "\" height=\"" << bar_h - 4
        << "\" fill=\"#3b6ea8\"/>";
    svg << "<text x=\"" << label_w + w + 4 << "\" y=\"" << y + 13 << "\">" << t.importance << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string heatmap(const ClassExplanation& c, const PairGrid& g) {
  const std::size_t rows = g.scores.size(), cols = rows ? g.scores.front().size() : 0;
  const int cell = 14, left = 60, top = 40;
  double max_abs = 0.0;
  for (const auto& r : g.scores) {
    for (double v : r) max_abs = std::max(max_abs, std::abs(v));
  }
  if (max_abs == 0.0) max_abs = 1.0;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << left + cell * static_cast<int>(cols) + 20
      << "\" height=\"" << top + cell * static_cast<int>(rows) + 20 << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<text x=\"10\" y=\"16\" font-weight=\"bold\">" << xml_escape(c.class_name) << ": " << xml_escape(g.first)
      << " (rows) x " << xml_escape(g.second) << " (cols)</text>\n";
  svg << "<text x=\"10\" y=\"32\">scale +/-" << max_abs << " logit; row/col 0 = missing</text>\n";
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < cols; ++k) {
      svg << "<rect x=\"" << left + cell * static_cast<int>(k) << "\" y=\"" << top + cell * static_cast<int>(r)
          << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"" << diverging(g.scores[r][k] / max_abs)
          << "\"/>";
    }
    svg << "\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

std::size_t ClassExplanation::rank_of(const std::string& feature) const {
  for (std::size_t i = 0; i < feature_ranking.size(); ++i) {
    if (feature_ranking[i].name == feature) return i;
  }
  return feature_ranking.size();
}

double ClassExplanation::logit(std::span<const double> row) const {
  double z = intercept;
  for (const auto& s : shapes) {
    if (s.feature_index >= row.size()) throw ConfigError("explanation: row is too short");
    z += s.scores[FeatureBins{s.cuts}.bin(row[s.feature_index])];
  }
  for (const auto& p : pairs) {
    if (p.first_index >= row.size() || p.second_index >= row.size()) throw ConfigError("explanation: row is too short");
    z += p.scores[FeatureBins{p.first_cuts}.bin(row[p.first_index])][FeatureBins{p.second_cuts}.bin(row[p.second_index])];
  }
  return z;
}

const ClassExplanation& Explanation::for_class(const std::string& name) const {
  for (const auto& c : classes) {
    if (c.class_name == name) return c;
  }
  throw ConfigError("explanation: no class '" + name + "'");
}

Explanation explain_global(const EbmModel& model, const std::string& class_name) {
  return {model.feature_names, {explain_class(model, class_name)}};
}

Explanation explain_global(const OvrEnsemble& ens) {
  Explanation e;
  if (!ens.models.empty()) e.feature_names = ens.models.front().feature_names;
  for (std::size_t c = 0; c < ens.models.size(); ++c) e.classes.push_back(explain_class(ens.models[c], ens.classes[c]));
  return e;
}

nlohmann::json explanation_to_json(const Explanation& e) {
  using nlohmann::json;
  auto ranking = [](const std::vector<RankedTerm>& terms) {
    json out = json::array();
    for (const auto& t : terms) out.push_back({{"name", t.name}, {"importance", t.importance}});
    return out;
  };
  json j;
  j["format"] = "gaborboost-explanation";
  j["version"] = kExplanationVersion;
  j["feature_names"] = e.feature_names;
  j["classes"] = json::array();
  for (const auto& c : e.classes) {
    json jc;
    jc["class"] = c.class_name;
    jc["intercept"] = c.intercept;
    jc["feature_importance"] = ranking(c.feature_ranking);
    jc["term_importance"] = ranking(c.term_ranking);
    jc["shapes"] = json::array();
    for (const auto& s : c.shapes) {
      jc["shapes"].push_back({{"feature", s.feature},
                              {"feature_index", s.feature_index},
                              {"importance", s.importance},
                              {"cuts", s.cuts},
                              {"scores", s.scores}});
    }
    jc["pairs"] = json::array();
    for (const auto& p : c.pairs) {
      jc["pairs"].push_back({{"features", {p.first, p.second}},
                             {"feature_indices", {p.first_index, p.second_index}},
                             {"importance", p.importance},
                             {"first_cuts", p.first_cuts},
                             {"second_cuts", p.second_cuts},
                             {"scores", p.scores}});
    }
    j["classes"].push_back(std::move(jc));
  }
  return j;
}

Explanation explanation_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "gaborboost-explanation") {
      throw ParseError("explanation: unexpected format tag");
    }
    if (j.at("version").get<int>() != kExplanationVersion) throw ParseError("explanation: unsupported version");
    auto ranking = [](const nlohmann::json& arr) {
      std::vector<RankedTerm> out;
      for (const auto& t : arr) out.push_back({t.at("name").get<std::string>(), t.at("importance").get<double>()});
      return out;
    };
    Explanation e;
    e.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    for (const auto& jc : j.at("classes")) {
      ClassExplanation c;
      c.class_name = jc.at("class").get<std::string>();
      c.intercept = jc.at("intercept").get<double>();
      c.feature_ranking = ranking(jc.at("feature_importance"));
      c.term_ranking = ranking(jc.at("term_importance"));
      for (const auto& s : jc.at("shapes")) {
        ShapeTable t{s.at("feature").get<std::string>(), s.at("feature_index").get<std::size_t>(),
                     s.at("cuts").get<std::vector<double>>(), s.at("scores").get<std::vector<double>>(),
                     s.at("importance").get<double>()};
        if (t.scores.size() != t.cuts.size() + 2) throw ParseError("explanation: shape table size mismatch");
        c.shapes.push_back(std::move(t));
      }
      for (const auto& p : jc.at("pairs")) {
        PairGrid g;
        const auto names = p.at("features").get<std::vector<std::string>>();
        const auto idx = p.at("feature_indices").get<std::vector<std::size_t>>();
        if (names.size() != 2 || idx.size() != 2) throw ParseError("explanation: malformed pair");
        g.first = names[0];
        g.second = names[1];
        g.first_index = idx[0];
        g.second_index = idx[1];
        g.importance = p.at("importance").get<double>();
        g.first_cuts = p.at("first_cuts").get<std::vector<double>>();
        g.second_cuts = p.at("second_cuts").get<std::vector<double>>();
        g.scores = p.at("scores").get<std::vector<std::vector<double>>>();
        if (g.scores.size() != g.first_cuts.size() + 2) throw ParseError("explanation: pair grid size mismatch");
        for (const auto& r : g.scores) {
          if (r.size() != g.second_cuts.size() + 2) throw ParseError("explanation: pair grid size mismatch");
        }
        c.pairs.push_back(std::move(g));
      }
      e.classes.push_back(std::move(c));
    }
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("explanation: ") + ex.what());
  }
}

void save_explanation(const Explanation& e, const std::filesystem::path& path) {
  write_text(path, explanation_to_json(e).dump(1) + "\n");
}

Explanation load_explanation(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  try {
    return explanation_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& ex) {
    throw ParseError(path.string() + ": " + ex.what());
  }
}

std::vector<std::filesystem::path> write_svgs(const Explanation& e, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& c : e.classes) {
    const std::string stem = file_stem(c.class_name);
    written.push_back(dir / (stem + "_importance.svg"));
    write_text(written.back(), bar_chart(c));
    for (const auto& p : c.pairs) {
      written.push_back(dir / (stem + "_pair_" + file_stem(p.first) + "_" + file_stem(p.second) + ".svg"));
      write_text(written.back(), heatmap(c, p));
    }
  }
  return written;
}

}  // namespace gaborboost
