#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "gaborboost/dataio.hpp"
#include "gaborboost/ebm.hpp"
#include "gaborboost/errors.hpp"
#include "gaborboost/explain.hpp"
#include "gaborboost/features.hpp"
#include "gaborboost/harness.hpp"
#include "gaborboost/parallel.hpp"
#include "gaborboost/physfit.hpp"
#include "gaborboost/synthgen.hpp"

using namespace gaborboost;

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw Error(path.string() + ": write failed");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "top=partial,bottom=partial" -> map; labels not mentioned map to themselves.
LabeledDataset prepare(const LabeledDataset& ds, const std::string& merge, const std::string& flip) {
  if (merge.empty() && flip.empty()) return ds;
  std::map<std::string, std::string> merge_map;
  for (const auto& l : ds.labels) merge_map[l] = l;
  for (const auto& item : split_list(merge)) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw ConfigError("--merge entries must look like from=to, got '" + item + "'");
    }
    merge_map[item.substr(0, eq)] = item.substr(eq + 1);
  }
  const auto flips = split_list(flip);
  return reduce_classes(ds, merge_map, std::set<std::string>(flips.begin(), flips.end()));
}

void add_ebm_options(CLI::App* sub, EbmConfig& e) {
  sub->add_option("--learning-rate", e.learning_rate, "boosting step size")->capture_default_str();
  sub->add_option("--max-rounds", e.max_rounds, "maximum boosting rounds per phase")->capture_default_str();
  sub->add_option("--patience", e.patience, "early-stopping patience in rounds")->capture_default_str();
  sub->add_option("--val-fraction", e.val_fraction, "held-out validation fraction")->capture_default_str();
  sub->add_option("--max-pairs", e.max_pairs, "pairwise terms to keep")->capture_default_str();
  sub->add_option("--max-bins", e.max_bins, "bins per feature")->capture_default_str();
  sub->add_option("--max-pair-bins", e.max_pair_bins, "bins per feature inside pair terms")->capture_default_str();
  sub->add_option("--max-leaves", e.max_leaves, "segments per main-effect update (0 = per bin)")
      ->capture_default_str();
  sub->add_option("--ebm-seed", e.seed, "validation split seed")->capture_default_str();
  sub->add_flag("--balance-classes", e.balance_classes, "inverse-frequency sample weights");
}

template <typename Enum>
CLI::Option* add_enum(CLI::App* sub, const std::string& name, Enum& target, const std::map<std::string, Enum>& values,
                      const std::string& help) {
  std::string names;
  for (const auto& [key, value] : values) names += (names.empty() ? "" : "|") + key;
  return sub->add_option(name, target, help)
      ->transform(CLI::CheckedTransformer(values, CLI::ignore_case).description(""))
      ->option_text("{" + names + "}");
}


// Replaces "--config FILE" after the subcommand with its key=value entries; command-line flags win.
std::vector<std::string> expand_config(const CLI::App& app, std::vector<std::string> args) {
  std::size_t sub = 0;
  while (sub < args.size() && app.get_subcommand_no_throw(args[sub]) == nullptr) ++sub;
  if (sub == args.size()) return args;
  const std::string name = args[sub];
  const CLI::App* cmd = app.get_subcommand_no_throw(name);

  std::string file;
  for (std::size_t i = sub + 1; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 == args.size()) throw CLI::ArgumentMismatch("--config needs a file");
      file = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (file.empty()) return args;

  auto given = [&](const std::string& flag) {
    for (std::size_t i = sub + 1; i < args.size(); ++i) {
      if (args[i] == flag || args[i].rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };
  std::vector<std::string> extra;
  for (const auto& item : CLI::ConfigINI().from_file(file)) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == name)) continue;
    const std::string flag = "--" + item.name;
    if (cmd->get_option_no_throw(flag) == nullptr) {
      throw CLI::ExtrasError(file + ": unknown key '" + item.name + "' for " + name, CLI::ExitCodes::ExtrasError);
    }
    if (given(flag)) continue;
    std::string value;
    for (const auto& v : item.inputs) value += (value.empty() ? "" : ",") + v;
    extra.push_back(flag + "=" + value);
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub) + 1, extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gabor quadrant features and explainable boosting for image classification", "gaborboost"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = GABORBOOST_THREADS or all cores)");

  // generate
  SynthSpec spec;
  std::filesystem::path gen_out;
  auto* gen = app.add_subcommand("generate", "write a labelled synthetic dataset");
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--width", spec.width)->capture_default_str();
  gen->add_option("--height", spec.height)->capture_default_str();
  gen->add_option("--longitudinal", spec.longitudinal)->capture_default_str();
  gen->add_option("--partial", spec.partial)->capture_default_str();
  gen->add_option("--vortex", spec.vortex)->capture_default_str();
  gen->add_option("--noise", spec.noise_sigma, "Gaussian noise sigma")->capture_default_str();
  gen->add_option("--seed", spec.seed)->capture_default_str();

  // tabularize
  std::filesystem::path tab_data, tab_out;
  FeatureOptions fopt;
  std::vector<double> sigma_x, sigma_y, periods;
  std::string merge, flip;
  auto* tab = app.add_subcommand("tabularize", "extract the feature table from an image directory");
  tab->add_option("--data", tab_data, "directory with images and labels.csv")->required();
  tab->add_option("--out", tab_out, "feature table CSV")->required();
  tab->add_flag("--with-pf", fopt.with_pf, "append physics-fit columns");
  add_enum(tab, "--mode", fopt.mode, {{"two-step", OptimizeMode::TwoStep}, {"full-grid", OptimizeMode::FullGrid}},
           "parameter search");
  add_enum(tab, "--backend", fopt.backend,
           {{"separable", ConvolutionBackend::Separable},
            {"direct", ConvolutionBackend::Direct},
            {"fft", ConvolutionBackend::Fft}},
           "convolution backend");
  add_enum(tab, "--dc", fopt.dc, {{"axis", DcCorrection::Axis}, {"global", DcCorrection::Global}, {"none", DcCorrection::None}},
           "kernel DC correction");
  tab->add_option("--epsilon", fopt.epsilon, "ratio guard")->capture_default_str();
  tab->add_option("--sigma-x", sigma_x, "sigma_x grid (comma separated)")->delimiter(',');
  tab->add_option("--sigma-y", sigma_y, "sigma_y grid (comma separated)")->delimiter(',');
  tab->add_option("--periods", periods, "carrier periods in pixels; lambda = 2 pi / period")->delimiter(',');
  tab->add_option("--merge", merge, "label merges, e.g. top=partial,bottom=partial");
  tab->add_option("--flip", flip, "original labels whose images are flipped horizontally");

  // fit-physics
  std::filesystem::path fp_data, fp_out, fp_table;
  Background background = Background::MedianColumns;
  auto* fp = app.add_subcommand("fit-physics", "fit the skewed Mexican-hat profile to each image");
  fp->add_option("--data", fp_data, "directory with images and labels.csv")->required();
  fp->add_option("--out", fp_out, "fit report CSV, or the merged table with --table")->required();
  fp->add_option("--table", fp_table, "feature table to extend with pf_* columns");
  add_enum(fp, "--background", background, {{"median", Background::MedianColumns}, {"none", Background::None}},
           "profile background subtraction");

  // train
  std::filesystem::path tr_table, tr_model;
  std::string tr_features = "GF+EGF";
  EbmConfig tr_ebm;
  auto* tr = app.add_subcommand("train", "train a one-vs-rest EBM on a feature table");
  tr->add_option("--table", tr_table, "feature table CSV")->required();
  tr->add_option("--model", tr_model, "output model JSON")->required();
  tr->add_option("--features", tr_features, "GF, GF+EGF, GF+PF, GF+EGF+PF or PF")->capture_default_str();
  add_ebm_options(tr, tr_ebm);

  // explain
  std::filesystem::path ex_model, ex_out, ex_svg;
  auto* ex = app.add_subcommand("explain", "global explanation bundle of a trained model");
  ex->add_option("--model", ex_model, "model JSON")->required();
  ex->add_option("--out", ex_out, "explanation JSON")->required();
  ex->add_option("--svg-dir", ex_svg, "also write SVG charts here");

  // evaluate
  std::filesystem::path ev_model, ev_table, ev_out;
  auto* ev = app.add_subcommand("evaluate", "score a trained model on a feature table");
  ev->add_option("--model", ev_model, "model JSON")->required();
  ev->add_option("--table", ev_table, "feature table CSV")->required();
  ev->add_option("--out", ev_out, "metrics JSON");

  // cv
  std::filesystem::path cv_table, cv_out, cv_text;
  std::string cv_features = "GF+EGF";
  CvConfig cv_config;
  auto* cv = app.add_subcommand("cv", "repeated stratified k-fold cross-validation");
  cv->add_option("--table", cv_table, "feature table CSV")->required();
  cv->add_option("--out", cv_out, "report JSON")->required();
  cv->add_option("--text", cv_text, "also write the text table here");
  cv->add_option("--features", cv_features, "GF, GF+EGF, GF+PF, GF+EGF+PF or PF")->capture_default_str();
  cv->add_option("--repeats", cv_config.repeats)->capture_default_str();
  cv->add_option("--k", cv_config.k, "folds")->capture_default_str();
  cv->add_option("--seed", cv_config.seed, "fold seed of the first repeat")->capture_default_str();
  add_ebm_options(cv, cv_config.ebm);

  for (CLI::App* sub : app.get_subcommands([](CLI::App*) { return true; })) {
    sub->add_option("--config")->description("key=value file of this command's options; command-line flags win");
  }

  try {
    auto args = expand_config(app, std::vector<std::string>(argv + 1, argv + argc));
    std::vector<char*> ptrs{argv[0]};
    for (auto& a : args) ptrs.push_back(a.data());
    app.parse(static_cast<int>(ptrs.size()), ptrs.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (threads > 0) setenv("GABORBOOST_THREADS", std::to_string(threads).c_str(), 1);

    if (*gen) {
      spec.validate();
      const SynthDataset synth = generate(spec);
      save_dataset(synth.data, gen_out);
      write_ground_truth(synth.truth, gen_out / "ground_truth.csv");
      std::cout << "wrote " << synth.data.size() << " images to " << gen_out.string() << "\n";
    } else if (*tab) {
      const LabeledDataset ds = prepare(load_dataset(tab_data), merge, flip);
      std::optional<ParamGrid> grid;
      if (!sigma_x.empty() || !sigma_y.empty() || !periods.empty()) {
        if (ds.size() == 0) throw ConfigError("empty dataset");
        ParamGrid g = ParamGrid::defaults(ds.images.front().width(), ds.images.front().height());
        if (!sigma_x.empty()) g.sigma_x_values = sigma_x;
        if (!sigma_y.empty()) g.sigma_y_values = sigma_y;
        if (!periods.empty()) {
          g.lambda_values.clear();
          for (double p : periods) {
            if (!(p > 0.0)) throw ConfigError("--periods must be positive");
            g.lambda_values.push_back(2.0 * std::numbers::pi / p);
          }
          std::sort(g.lambda_values.begin(), g.lambda_values.end());
        }
        g.validate();
        grid = g;
      }
      const auto rows = tabularize(ds, grid, fopt);
      write_feature_table(rows, tab_out);
      std::size_t failed = 0;
      for (const auto& r : rows) failed += r.pf && r.pf_failed();
      std::cout << "wrote " << rows.size() << " rows to " << tab_out.string();
      if (fopt.with_pf) std::cout << " (" << failed << " physics fits failed)";
      std::cout << "\n";
    } else if (*fp) {
      const LabeledDataset ds = load_dataset(fp_data);
      std::vector<PfFit> fits(ds.size());
      parallel_for(ds.size(), [&](std::size_t i) {
        try {
          fits[i] = fit_mexican_hat(project(ds.images[i], background));
        } catch (const ParameterError&) {
          fits[i].status = FitStatus::Diverged;
        }
      });
      std::size_t failed = 0;
      for (const auto& f : fits) failed += !f.ok();
      if (!fp_table.empty()) {
        auto rows = read_feature_table(fp_table);
        std::map<std::string, std::size_t> by_name;
        for (std::size_t i = 0; i < ds.size(); ++i) by_name[ds.names[i]] = i;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (auto& row : rows) {
          const auto it = by_name.find(row.id);
          if (it == by_name.end()) throw ConfigError("table row '" + row.id + "' has no image in " + fp_data.string());
          const auto& f = fits[it->second];
          row.pf = f.ok() ? f.params : PfParams{nan, nan, nan, nan, nan};
        }
        write_feature_table(rows, fp_out);
      } else {
        std::ostringstream csv;
        csv.precision(17);
        csv << "id,label,pf_amp,pf_center,pf_width,pf_skew,pf_offset,status,residual_norm,iterations\n";
        for (std::size_t i = 0; i < ds.size(); ++i) {
          const auto& f = fits[i];
          const auto& p = f.params;
          csv << ds.names[i] << ',' << ds.labels[i] << ',' << p.amp << ',' << p.center << ',' << p.width << ','
              << p.skew << ',' << p.offset << ',' << to_string(f.status) << ',' << f.residual_norm << ','
              << f.iterations << "\n";
        }
        write_file(fp_out, csv.str());
      }
      std::cout << "fitted " << ds.size() << " images, " << failed << " flagged\n";
    } else if (*tr) {
      const auto data = select_features(read_feature_table(tr_table), parse_feature_set(tr_features));
      const OvrEnsemble ens = train_ovr(data.matrix, data.labels, tr_ebm);
      save_ensemble(ens, tr_model);
      std::cout << "trained " << ens.classes.size() << " one-vs-rest models on " << data.matrix.rows << " rows";
      if (data.excluded_pf_failures) std::cout << " (" << data.excluded_pf_failures << " excluded)";
      std::cout << "\n";
    } else if (*ex) {
      const Explanation e = explain_global(load_ensemble(ex_model));
      save_explanation(e, ex_out);
      for (const auto& c : e.classes) {
        std::cout << c.class_name << ":";
        for (std::size_t i = 0; i < std::min<std::size_t>(7, c.feature_ranking.size()); ++i) {
          std::cout << " " << c.feature_ranking[i].name;
        }
        std::cout << "\n";
      }
      if (!ex_svg.empty()) std::cout << "wrote " << write_svgs(e, ex_svg).size() << " SVG files\n";
    } else if (*ev) {
      const OvrEnsemble ens = load_ensemble(ev_model);
      if (ens.models.empty()) throw ParseError("model has no classes");
      const auto data = select_columns(read_feature_table(ev_table), ens.models.front().feature_names);
      const Confusion m = evaluate(ens, data);
      const Metrics metrics = compute_metrics(m);
      std::cout << "rows " << data.matrix.rows << ", accuracy " << metrics.accuracy << "%\n";
      for (std::size_t c = 0; c < ens.classes.size(); ++c) {
        std::cout << ens.classes[c] << ": precision " << metrics.precision[c] << "%"
                  << (metrics.precision_undefined[c] ? " (undefined)" : "") << ", recall " << metrics.recall[c] << "%"
                  << (metrics.recall_undefined[c] ? " (undefined)" : "") << "\n";
      }
      if (!ev_out.empty()) {
        nlohmann::json j{{"classes", ens.classes},
                         {"rows", data.matrix.rows},
                         {"excluded_pf_failures", data.excluded_pf_failures},
                         {"confusion", m},
                         {"accuracy", metrics.accuracy},
                         {"precision", metrics.precision},
                         {"recall", metrics.recall},
                         {"precision_undefined", metrics.precision_undefined},
                         {"recall_undefined", metrics.recall_undefined}};
        write_file(ev_out, j.dump(1) + "\n");
      }
    } else if (*cv) {
      cv_config.feature_set = parse_feature_set(cv_features);
      const CvReport report = run_cv(read_feature_table(cv_table), cv_config);
      write_file(cv_out, report.to_json().dump(1) + "\n");
      const std::string text = report.to_text();
      if (!cv_text.empty()) write_file(cv_text, text);
      std::cout << text;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
