#include "jk/serialization.hpp"

#include <fstream>
#include <stdexcept>

namespace jk {

Json to_json(const KernelSpec& spec) {
  Json layers = Json::array();
  for (const auto& [p, kernel] : spec.layers()) {
    layers.push_back({{"p", p}, {"beta", kernel.beta.beta}});
  }
  return {{"n", spec.n()}, {"kind", std::string(kind_name(spec.kind()))}, {"layers", layers}};
}

KernelSpec kernel_spec_from_json(const Json& j) {
  const int n = j.at("n").get<int>();
  KernelSpec spec(n, parse_kind(j.at("kind").get<std::string>()));
  for (const auto& entry : j.at("layers")) {
    const int p = entry.at("p").get<int>();
    auto beta = entry.at("beta").get<std::vector<double>>();
    const LayerParams actual{n, p};
    actual.validate();
    const LayerParams canon = actual.canonical_form();
    if (beta.size() == canon.size()) {
      spec.set_layer(p, make_layer_kernel(BetaCoeffs{canon, std::move(beta)}));
    } else if (beta.size() == actual.size()) {
      spec.set_layer(p, make_layer_kernel(BetaCoeffs{actual, std::move(beta)}));
    } else {
      throw std::invalid_argument("layer " + std::to_string(p) + " beta has " +
                                  std::to_string(beta.size()) + " entries");
    }
  }
  return spec;
}

Json to_json(const TrainedModel& model) {
  Json support = Json::array();
  for (const auto& x : model.support) support.push_back(x.to_string());
  return {{"spec", to_json(model.spec)}, {"support", support}, {"alphas", model.alphas}};
}

TrainedModel trained_model_from_json(const Json& j) {
  TrainedModel model;
  model.spec = kernel_spec_from_json(j.at("spec"));
  for (const auto& s : j.at("support")) model.support.push_back(HypercubePoint::parse(s.get<std::string>()));
  model.alphas = j.at("alphas").get<std::vector<double>>();
  if (model.alphas.size() != model.support.size()) {
    throw std::invalid_argument("model has " + std::to_string(model.support.size()) +
                                " support points but " + std::to_string(model.alphas.size()) +
                                " coefficients");
  }
  return model;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return Json::parse(is);
}

void write_json_file(const Json& j, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace jk
