#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <utility>
#include <vector>

#include "avsal/audio.hpp"
#include "avsal/fixation.hpp"
#include "avsal/map_io.hpp"
#include "avsal/metrics.hpp"
#include "avsal/types.hpp"

namespace py = pybind11;

namespace {

using Array2d = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Array1d = py::array_t<double, py::array::c_style | py::array::forcecast>;
using PointList = std::vector<std::pair<int, int>>;

avsal::SaliencyMap to_map(const Array2d& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-d array");
  avsal::SaliencyMap m(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  const double* src = a.data();
  std::copy(src, src + m.values.size(), m.values.begin());
  return m;
}

Array2d from_map(const avsal::SaliencyMap& m) {
  Array2d a({static_cast<py::ssize_t>(m.height), static_cast<py::ssize_t>(m.width)});
  std::copy(m.values.begin(), m.values.end(), a.mutable_data());
  return a;
}

// Points are (y, x) pairs in pixel coordinates.
avsal::FixationFrame to_frame(const PointList& points, int height, int width) {
  avsal::FixationFrame f(height, width);
  for (const auto& [y, x] : points) f.add(y, x);
  return f;
}

avsal::PcmSignal to_signal(const Array1d& samples, int rate) {
  if (samples.ndim() != 1) throw py::value_error("expected a 1-d array");
  avsal::PcmSignal s;
  s.sample_rate = rate;
  s.samples.assign(samples.data(), samples.data() + samples.shape(0));
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Audio-visual saliency metrics and signal utilities";

  py::register_exception<avsal::Error>(mod, "AvsalError", PyExc_ValueError);

  py::class_<avsal::AnovaResult>(mod, "AnovaResult")
      .def_readonly("f", &avsal::AnovaResult::f)
      .def_readonly("p", &avsal::AnovaResult::p)
      .def_readonly("degenerate_within", &avsal::AnovaResult::degenerate_within)
      .def("__repr__", [](const avsal::AnovaResult& r) {
        return "AnovaResult(f=" + std::to_string(r.f) + ", p=" + std::to_string(r.p) + ")";
      });

  mod.def(
      "nss",
      [](const Array2d& s, const PointList& fixations) {
        avsal::SaliencyMap m = to_map(s);
        return avsal::nss(m, to_frame(fixations, m.height, m.width));
      },
      py::arg("saliency"), py::arg("fixations"),
      "Mean z-scored saliency at fixated (y, x) pixels.");

  mod.def(
      "cc", [](const Array2d& s, const Array2d& g) { return avsal::cc(to_map(s), to_map(g)); },
      py::arg("saliency"), py::arg("density"), "Pearson correlation over all pixels.");

  mod.def(
      "sim", [](const Array2d& s, const Array2d& g) { return avsal::sim(to_map(s), to_map(g)); },
      py::arg("saliency"), py::arg("density"),
      "Histogram intersection of two maps that each sum to 1.");

  mod.def(
      "auc_judd",
      [](const Array2d& s, const PointList& fixations) {
        avsal::SaliencyMap m = to_map(s);
        return avsal::auc_judd(m, to_frame(fixations, m.height, m.width));
      },
      py::arg("saliency"), py::arg("fixations"),
      "ROC area with thresholds at the fixated saliency values.");

  mod.def(
      "sauc",
      [](const Array2d& s, const PointList& fixations, const PointList& negatives) {
        avsal::SaliencyMap m = to_map(s);
        return avsal::sauc(m, to_frame(fixations, m.height, m.width),
                           to_frame(negatives, m.height, m.width));
      },
      py::arg("saliency"), py::arg("fixations"), py::arg("negatives"),
      "Shuffled AUC: false positives drawn from the negative point set.");

  mod.def(
      "kl_div", [](const Array2d& s, const Array2d& g) { return avsal::kl_div(to_map(s), to_map(g)); },
      py::arg("saliency"), py::arg("density"),
      "KL divergence of the density from the saliency map.");

  mod.def("anova_oneway", &avsal::anova_oneway, py::arg("groups"),
          "One-way fixed-effects ANOVA over >= 2 groups.");

  mod.def(
      "density_map",
      [](const PointList& fixations, int height, int width, double pixels_per_degree) {
        avsal::ViewingGeometry geom{pixels_per_degree};
        return from_map(avsal::density_map(to_frame(fixations, height, width), geom));
      },
      py::arg("fixations"), py::arg("height"), py::arg("width"), py::arg("pixels_per_degree"),
      "Gaussian fixation density (sigma = pixels per degree), total mass 1.");

  mod.def(
      "mep",
      [](const std::vector<Array2d>& maps) {
        std::vector<avsal::Distribution> ds;
        ds.reserve(maps.size());
        for (const auto& m : maps) ds.push_back(avsal::Distribution(to_map(m)));
        return from_map(avsal::mep(ds));
      },
      py::arg("densities"), "Mean eye position: pixelwise mean of densities, renormalized.");

  mod.def(
      "resample",
      [](const Array1d& samples, int sample_rate, int target_rate) {
        avsal::PcmSignal out = avsal::resample(to_signal(samples, sample_rate), target_rate);
        Array1d a(static_cast<py::ssize_t>(out.samples.size()));
        std::copy(out.samples.begin(), out.samples.end(), a.mutable_data());
        return a;
      },
      py::arg("samples"), py::arg("sample_rate"), py::arg("target_rate"),
      "Windowed-sinc resampling to the target rate.");

  mod.def(
      "log_mel",
      [](const Array1d& samples, int sample_rate) {
        avsal::LogMelSpectrogram spec = avsal::log_mel(to_signal(samples, sample_rate));
        Array2d a({static_cast<py::ssize_t>(spec.frames),
                   static_cast<py::ssize_t>(avsal::LogMelSpectrogram::kBands)});
        std::copy(spec.values.begin(), spec.values.end(), a.mutable_data());
        return a;
      },
      py::arg("samples"), py::arg("sample_rate") = avsal::kAudioRate,
      "Log-mel spectrogram, (frames, 64), natural log with +0.01 offset.");

  mod.def(
      "read_map", [](const std::filesystem::path& path) { return from_map(avsal::read_map(path)); },
      py::arg("path"), "Read a saliency map (.smf or .pgm by extension).");

  mod.def(
      "write_map",
      [](const Array2d& map, const std::filesystem::path& path) {
        avsal::write_map(to_map(map), path);
      },
      py::arg("map"), py::arg("path"), "Write a saliency map (.smf or .pgm by extension).");

  mod.attr("KL_EPSILON") = avsal::kKlEpsilon;
  mod.attr("AUDIO_RATE") = avsal::kAudioRate;
  mod.attr("MEL_BANDS") = avsal::LogMelSpectrogram::kBands;
}
