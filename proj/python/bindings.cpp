/*
 * Copyright 2026 The svbias Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "svbias/bias.hpp"
#include "svbias/det.hpp"
#include "svbias/error.hpp"
#include "svbias/metrics.hpp"
#include "svbias/pipeline.hpp"
#include "svbias/report_io.hpp"
#include "svbias/synth.hpp"

namespace py = pybind11;
using namespace svbias;

namespace {

DcfConfig make_config(double p_target, double c_fn, double c_fp) {
  DcfConfig c;
  c.p_target = p_target;
  c.c_fn = c_fn;
  c.c_fp = c_fp;
  c.validate();
  return c;
}

// Runs the full audit over two files and returns the JSON report text.
std::string audit_files(const std::string& scores, const std::string& metadata,
                        const std::vector<std::string>& attributes,
                        const std::string& output_dir, double p_target,
                        double c_fn, double c_fp, unsigned jobs) {
  AuditConfig config;
  config.scores_path = scores;
  config.metadata_path = metadata;
  config.attributes = attributes;
  config.output_dir = output_dir;
  config.options.dcf = make_config(p_target, c_fn, c_fp);
  config.options.jobs = jobs;
  AuditRun run;
  {
    py::gil_scoped_release release;
    run = run_audit(config);
  }
  return report_to_json(run.report);
}

// Writes a seeded synthetic corpus: trials.txt and metadata.csv.
void synthesize(const std::string& output_dir, const std::string& attribute,
                const std::vector<py::dict>& groups) {
  std::vector<SubgroupScoreSpec> specs;
  std::uint64_t seed = 1;
  for (const py::dict& g : groups) {
    SubgroupScoreSpec s;
    s.key = SubgroupKey({{attribute, g["value"].cast<std::string>()}});
    s.seed = seed++;
    if (g.contains("target_mean")) s.target_mean = g["target_mean"].cast<double>();
    if (g.contains("target_sd")) s.target_sd = g["target_sd"].cast<double>();
    if (g.contains("nontarget_mean"))
      s.nontarget_mean = g["nontarget_mean"].cast<double>();
    if (g.contains("nontarget_sd"))
      s.nontarget_sd = g["nontarget_sd"].cast<double>();
    if (g.contains("n_target")) s.n_target = g["n_target"].cast<std::size_t>();
    if (g.contains("n_nontarget"))
      s.n_nontarget = g["n_nontarget"].cast<std::size_t>();
    if (g.contains("speakers")) s.n_speakers = g["speakers"].cast<std::size_t>();
    if (g.contains("seed")) s.seed = g["seed"].cast<std::uint64_t>();
    specs.push_back(std::move(s));
  }
  const SyntheticCorpus corpus = generate(specs);
  std::ostringstream trials, meta;
  write_trials(trials, corpus.trials.records);
  write_metadata(meta, corpus.metadata);
  write_file(std::filesystem::path(output_dir) / "trials.txt", trials.str());
  write_file(std::filesystem::path(output_dir) / "metadata.csv", meta.str());
}

}  // namespace

PYBIND11_MODULE(_svbias, m) {
  m.doc() = "Speaker verification bias audit core.";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<EvaluationError>(m, "EvaluationError",
                                          PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<ErrorCounts>(m, "ErrorCounts")
      .def_readonly("false_accepts", &ErrorCounts::false_accepts)
      .def_readonly("n_nontarget", &ErrorCounts::n_nontarget)
      .def_readonly("false_rejects", &ErrorCounts::false_rejects)
      .def_readonly("n_target", &ErrorCounts::n_target);

  py::class_<OperatingPoint>(m, "OperatingPoint")
      .def_readonly("threshold", &OperatingPoint::threshold)
      .def_readonly("fpr", &OperatingPoint::fpr)
      .def_readonly("fnr", &OperatingPoint::fnr)
      .def_readonly("cost", &OperatingPoint::cost)
      .def_readonly("counts", &OperatingPoint::counts)
      .def("__repr__", [](const OperatingPoint& p) {
        std::ostringstream s;
        s << "OperatingPoint(threshold=" << p.threshold << ", fpr=" << p.fpr
          << ", fnr=" << p.fnr << ", cost=" << p.cost << ")";
        return s.str();
      });

  py::class_<ErrorCurve>(m, "ErrorCurve")
      .def_readonly("thresholds", &ErrorCurve::thresholds)
      .def_property_readonly("fpr", &ErrorCurve::fpr_values)
      .def_property_readonly("fnr", &ErrorCurve::fnr_values)
      .def("__len__", &ErrorCurve::size);

  m.def("dcf",
        [](double fpr, double fnr, double p_target, double c_fn, double c_fp) {
          return dcf(fpr, fnr, make_config(p_target, c_fn, c_fp));
        },
        py::arg("fpr"), py::arg("fnr"), py::arg("p_target") = 0.05,
        py::arg("c_fn") = 1.0, py::arg("c_fp") = 1.0);
  m.def("error_curve",
        [](const std::vector<double>& t, const std::vector<double>& n) {
          return compute_error_curve(t, n);
        },
        py::arg("targets"), py::arg("nontargets"));
  m.def("eer", py::overload_cast<const ErrorCurve&>(&eer), py::arg("curve"));
  m.def("min_dcf",
        [](const ErrorCurve& curve, double p_target, double c_fn, double c_fp) {
          return min_dcf(curve, make_config(p_target, c_fn, c_fp));
        },
        py::arg("curve"), py::arg("p_target") = 0.05, py::arg("c_fn") = 1.0,
        py::arg("c_fp") = 1.0);
  m.def("operating_point_at",
        [](const ErrorCurve& curve, double threshold, double p_target,
           double c_fn, double c_fp) {
          return operating_point_at(curve, threshold,
                                    make_config(p_target, c_fn, c_fp));
        },
        py::arg("curve"), py::arg("threshold"), py::arg("p_target") = 0.05,
        py::arg("c_fn") = 1.0, py::arg("c_fp") = 1.0);

  m.def("subgroup_bias", &subgroup_bias, py::arg("subgroup_cost"),
        py::arg("overall_cost"));
  m.def("threshold_bias", &threshold_bias, py::arg("cost_at_overall_min"),
        py::arg("cost_at_own_min"));

  m.def("probit", [](double p) { return probit(p); }, py::arg("p"));
  m.def("inverse_normal_cdf", &inverse_normal_cdf, py::arg("p"));
  m.def("normal_cdf", &normal_cdf, py::arg("x"));

  m.def("audit_files", &audit_files, py::arg("scores"), py::arg("metadata"),
        py::arg("attributes"), py::arg("output_dir"),
        py::arg("p_target") = 0.05, py::arg("c_fn") = 1.0,
        py::arg("c_fp") = 1.0, py::arg("jobs") = 1);
  m.def("synthesize", &synthesize, py::arg("output_dir"), py::arg("attribute"),
        py::arg("groups"));
}
