#include "grtr/serialization.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace grtr {

using nlohmann::json;

json config_to_json(const GrtrConfig& c) {
  return {{"rank", c.rank},
          {"lambdas", c.lambdas},
          {"learning_rate", c.learning_rate},
          {"tolerance", c.tolerance},
          {"max_steps", c.max_steps},
          {"seed", c.seed},
          {"init_scale", c.init_scale},
          {"init_range", c.init_range == InitRange::Positive ? "positive" : "symmetric"},
          {"bias_update", c.bias_update == BiasUpdate::PerMode ? "per_mode" : "per_epoch"},
          {"rho", c.rho}};
}

GrtrConfig config_from_json(const json& j) {
  GrtrConfig c;
  c.rank = j.value("rank", c.rank);
  c.lambdas = j.value("lambdas", c.lambdas);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.tolerance = j.value("tolerance", c.tolerance);
  c.max_steps = j.value("max_steps", c.max_steps);
  c.seed = j.value("seed", c.seed);
  c.init_scale = j.value("init_scale", c.init_scale);
  c.rho = j.value("rho", c.rho);
  const std::string init = j.value("init_range", std::string("symmetric"));
  if (init == "symmetric") {
    c.init_range = InitRange::Symmetric;
  } else if (init == "positive") {
    c.init_range = InitRange::Positive;
  } else {
    throw DataError("unknown init_range '" + init + "'");
  }
  const std::string bias = j.value("bias_update", std::string("per_mode"));
  if (bias == "per_mode") {
    c.bias_update = BiasUpdate::PerMode;
  } else if (bias == "per_epoch") {
    c.bias_update = BiasUpdate::PerEpoch;
  } else {
    throw DataError("unknown bias_update '" + bias + "'");
  }
  return c;
}

json model_to_json(const GrtrModel& m) {
  json factors = json::array();
  for (const auto& u : m.factors.factors()) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(u.size()));
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      for (Eigen::Index r = 0; r < u.cols(); ++r) flat.push_back(u(i, r));
    }
    factors.push_back(std::move(flat));
  }
  return {{"rank", m.factors.rank()},
          {"shapes", m.factors.shape()},
          {"factors", std::move(factors)},
          {"bias", m.bias},
          {"config", config_to_json(m.config)}};
}

GrtrModel model_from_json(const json& j) {
  try {
    const auto rank = j.at("rank").get<std::size_t>();
    const auto shapes = j.at("shapes").get<Shape>();
    const auto& factors = j.at("factors");
    if (factors.size() != shapes.size()) throw DataError("model JSON: factors and shapes differ in length");
    std::vector<Matrix> us;
    for (std::size_t n = 0; n < shapes.size(); ++n) {
      const auto flat = factors[n].get<std::vector<double>>();
      if (flat.size() != shapes[n] * rank) {
        throw DataError("model JSON: factor " + std::to_string(n + 1) + " has " + std::to_string(flat.size()) +
                        " entries, expected " + std::to_string(shapes[n] * rank));
      }
      Matrix u(static_cast<Eigen::Index>(shapes[n]), static_cast<Eigen::Index>(rank));
      for (Eigen::Index i = 0; i < u.rows(); ++i) {
        for (Eigen::Index r = 0; r < u.cols(); ++r) u(i, r) = flat[static_cast<std::size_t>(i * u.cols() + r)];
      }
      us.push_back(std::move(u));
    }
    GrtrModel m{CpdFactors(std::move(us)), j.at("bias").get<double>(), {}};
    if (j.contains("config")) m.config = config_from_json(j.at("config"));
    m.config.rank = rank;
    if (m.config.lambdas.size() != shapes.size()) m.config.lambdas.assign(shapes.size(), 0.0);
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model JSON: ") + e.what());
  }
}

json tensor_to_json(const DenseTensor& t) {
  return {{"shape", t.shape()}, {"data", std::vector<double>(t.data().begin(), t.data().end())}};
}

DenseTensor tensor_from_json(const json& j) {
  try {
    return DenseTensor(j.at("shape").get<Shape>(), j.at("data").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed tensor JSON: ") + e.what());
  }
}

std::string matrix_to_csv(const Matrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += fmt::format("{}", m(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string trace_to_csv(const TrainTrace& trace) {
  std::string out = "iteration,mse,loss\n";
  for (std::size_t k = 0; k < trace.mse.size(); ++k) {
    out += fmt::format("{},{},{}\n", k + 1, trace.mse[k], trace.loss[k]);
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw DataError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw DataError("failed writing " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw DataError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

}  // namespace grtr
