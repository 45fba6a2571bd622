#include "kanedge/model_io.hpp"

#include <fstream>
#include <string>

#include "kanedge/error.hpp"
#include "kanedge/json_util.hpp"

namespace kanedge {

nlohmann::json model_to_json(const KanNetwork& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : net.layers) {
    const auto c = l.coefficients();
    const auto w = l.residual_weights();
    layers.push_back({{"n_in", l.n_in()},
                      {"n_out", l.n_out()},
                      {"G", l.grid().intervals},
                      {"K", l.grid().degree},
                      {"x_min", l.grid().x_min},
                      {"x_max", l.grid().x_max},
                      {"c", std::vector<double>(c.begin(), c.end())},
                      {"w_b", std::vector<double>(w.begin(), w.end())}});
  }
  return {{"version", kModelFormatVersion}, {"layers", layers}};
}

KanNetwork model_from_json(const nlohmann::json& doc) {
  try {
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion)
      throw ConfigError("model: unsupported version " + std::to_string(version));
    KanNetwork net;
    for (const auto& jl : doc.at("layers")) {
      const SplineGrid grid(jl.at("G").get<int>(), jl.at("K").get<int>(),
                            jl.at("x_min").get<double>(),
                            jl.at("x_max").get<double>());
      KanLayer layer(jl.at("n_in").get<int>(), jl.at("n_out").get<int>(), grid);
      const auto c = jl.at("c").get<std::vector<double>>();
      const auto w = jl.at("w_b").get<std::vector<double>>();
      if (c.size() != layer.coefficients().size())
        throw ConfigError("model: layer c has " + std::to_string(c.size()) +
                          " values, expected " +
                          std::to_string(layer.coefficients().size()));
      if (w.size() != layer.residual_weights().size())
        throw ConfigError("model: layer w_b has " + std::to_string(w.size()) +
                          " values, expected " +
                          std::to_string(layer.residual_weights().size()));
      std::copy(c.begin(), c.end(), layer.coefficients().begin());
      std::copy(w.begin(), w.end(), layer.residual_weights().begin());
      net.layers.push_back(std::move(layer));
    }
    net.validate();
    return net;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

void save_model(const KanNetwork& net, const std::filesystem::path& path) {
  write_text_atomic(path, model_to_json(net).dump(1) + "\n");
}

KanNetwork load_model(const std::filesystem::path& path) {
  return model_from_json(read_json(path));
}

}  // namespace kanedge
