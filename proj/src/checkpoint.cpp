#include "asd/checkpoint.hpp"

#include "asd/error.hpp"

namespace asd {

using nlohmann::json;

json config_to_json(const ModelConfig& c) {
  return {{"in_dim", c.in_dim},
          {"n_symptoms", c.n_symptoms},
          {"n_diseases", c.n_diseases},
          {"hidden", c.hidden},
          {"t_max", c.t_max},
          {"tie_symptom_matrices", c.tie_symptom_matrices},
          {"tie_disease_matrices", c.tie_disease_matrices}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.in_dim = j.at("in_dim").get<std::size_t>();
  c.n_symptoms = j.at("n_symptoms").get<std::size_t>();
  c.n_diseases = j.at("n_diseases").get<std::size_t>();
  c.hidden = j.at("hidden").get<std::size_t>();
  c.t_max = j.at("t_max").get<int>();
  c.tie_symptom_matrices = j.value("tie_symptom_matrices", false);
  c.tie_disease_matrices = j.value("tie_disease_matrices", false);
  return c;
}

json model_to_json(const Model& model) {
  json j;
  j["format_version"] = kCheckpointFormat;
  j["arch"] = to_string(model.config.arch);
  j["task"] = to_string(model.config.task);
  j["config"] = config_to_json(model.config);
  model.for_each_tensor([&](const char* name, const Matrix& t, bool) {
    j[name] = {{"shape", {t.rows(), t.cols()}}, {"values", std::vector<double>(t.flat().begin(), t.flat().end())}};
  });
  return j;
}

Model model_from_json(const json& j) {
  try {
    if (j.at("format_version").get<int>() != kCheckpointFormat) fail(Errc::Parse, "unsupported checkpoint format_version");
    ModelConfig c = config_from_json(j.at("config"));
    c.arch = parse_arch(j.at("arch").get<std::string>());
    c.task = parse_task(j.at("task").get<std::string>());
    Model m = Model::zeros_like(Model{c, {}});
    m.for_each_tensor([&](const char* name, Matrix& t, bool) {
      const json& e = j.at(name);
      const auto shape = e.at("shape").get<std::vector<std::size_t>>();
      const auto values = e.at("values").get<std::vector<double>>();
      if (shape.size() != 2 || shape[0] != t.rows() || shape[1] != t.cols() || values.size() != t.size()) {
        fail(Errc::ShapeMismatch, std::string("checkpoint tensor ") + name + " has the wrong shape");
      }
      std::copy(values.begin(), values.end(), t.flat().begin());
    });
    return m;
  } catch (const json::exception& e) {
    fail(Errc::Parse, std::string("checkpoint: ") + e.what());
  }
}

}  // namespace asd
