#include "io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "error.hpp"

namespace qipm {

using nlohmann::json;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, path + ": " + e.what());
  }
  if (!j.is_object()) throw Error(Errc::parse_error, path + ": not a JSON object");
  return j;
}

std::string format_of(const json& j) {
  const auto it = j.find("format");
  return it != j.end() && it->is_string() ? it->get<std::string>() : "";
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  out << j.dump() << '\n';
  if (!out) throw Error(Errc::io_error, "write failed: " + path);
}

Eigen::VectorXd to_vector(const json& parent, const char* what, Index expected) {
  if (!parent.contains(what)) {
    throw Error(Errc::parse_error, std::string("missing field ") + what);
  }
  const json& j = parent.at(what);
  if (!j.is_array() || static_cast<Index>(j.size()) != expected) {
    throw Error(Errc::parse_error, std::string(what) + " must be an array of " +
                                       std::to_string(expected) + " numbers");
  }
  Eigen::VectorXd v(expected);
  for (Index i = 0; i < expected; ++i) {
    const auto& e = j[static_cast<size_t>(i)];
    if (!e.is_number()) {
      throw Error(Errc::parse_error, std::string(what) + " has a non-number");
    }
    v[i] = e.get<double>();
  }
  return v;
}

template <typename Vec>
json to_array(const Vec& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) {
    throw Error(Errc::parse_error, std::string("missing field ") + key);
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, std::string("field ") + key + ": " + e.what());
  }
}

}  // namespace

void save_dataset(const SvmDataset& data, const std::string& path) {
  data.validate();
  json j;
  j["format"] = "qipm-svm-dataset";
  j["n"] = data.features();
  j["m"] = data.points();
  j["p"] = data.p;
  j["seed"] = data.seed;
  j["labels"] = to_array(data.y);
  j["X"] = to_array(data.X.reshaped());
  write_json(j, path);
}

SvmDataset load_dataset(const std::string& path) {
  const json j = read_json(path);
  if (format_of(j) != "qipm-svm-dataset") {
    throw Error(Errc::parse_error, path + " is not a dataset file");
  }
  const auto n = field<Index>(j, "n");
  const auto m = field<Index>(j, "m");
  if (n < 1 || m < 1) throw Error(Errc::parse_error, "n and m must be >= 1");
  SvmDataset d;
  d.p = field<double>(j, "p");
  d.seed = field<std::uint64_t>(j, "seed");
  d.y = to_vector(j, "labels", m);
  d.X = to_vector(j, "X", n * m).reshaped(n, m);
  d.validate();
  return d;
}

void save_instance(const SocpInstance& inst, const std::string& path,
                   const std::optional<BlockVector>& primal_hint) {
  json j;
  j["format"] = "qipm-socp";
  j["m"] = inst.m();
  j["n"] = inst.n();
  json sizes = json::array();
  for (Index s : inst.cones()->sizes()) sizes.push_back(s);
  j["cones"] = sizes;
  const Eigen::MatrixXd At = inst.A().transpose();
  j["A"] = to_array(At.reshaped());
  j["b"] = to_array(inst.b());
  j["c"] = to_array(inst.c().values());
  if (primal_hint) j["x0"] = to_array(primal_hint->values());
  if (const auto& layout = inst.svm_layout()) {
    j["svm"] = {{"features", layout->features},
                {"points", layout->points},
                {"folded_bias", layout->folded_bias},
                {"margin_surplus", layout->margin_surplus}};
  }
  write_json(j, path);
}

LoadedInstance load_instance(const std::string& path) {
  const json j = read_json(path);
  if (format_of(j) != "qipm-socp") {
    throw Error(Errc::parse_error, path + " is not an SOCP instance file");
  }
  const auto m = field<Index>(j, "m");
  const auto n = field<Index>(j, "n");
  if (m < 1 || n < 1) throw Error(Errc::parse_error, "m and n must be >= 1");
  const auto sizes = field<std::vector<Index>>(j, "cones");
  const ConePtr cones = make_cones(sizes);
  if (cones->n() != n) {
    throw Error(Errc::structure_mismatch, "cone sizes do not add up to n");
  }
  Eigen::MatrixXd A = to_vector(j, "A", m * n).reshaped(n, m).transpose();
  Eigen::VectorXd b = to_vector(j, "b", m);
  BlockVector c(cones, to_vector(j, "c", n));
  std::optional<SvmLayout> layout;
  if (j.contains("svm")) {
    const json& s = j.at("svm");
    if (!s.is_object()) throw Error(Errc::parse_error, "field svm must be an object");
    layout = SvmLayout{field<Index>(s, "features"), field<Index>(s, "points"),
                       field<bool>(s, "folded_bias"),
                       s.contains("margin_surplus") && field<bool>(s, "margin_surplus")};
  }
  std::optional<BlockVector> hint;
  if (j.contains("x0")) hint = BlockVector(cones, to_vector(j, "x0", n));
  return {SocpInstance(std::move(A), std::move(b), std::move(c), layout),
          std::move(hint)};
}

std::string file_format(const std::string& path) {
  const json j = read_json(path);
  const std::string f = format_of(j);
  if (f != "qipm-svm-dataset" && f != "qipm-socp") {
    throw Error(Errc::parse_error, path + ": unknown file format");
  }
  return f;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_trace_csv(const SolveTrace& trace, std::ostream& out) {
  out << "index,sigma,mu_before,mu_after,d_before,d_after,lambda_min_x,"
         "lambda_min_s,delta_i,injected_error,kappa_i,zeta_i,dx_norm,ds_norm,"
         "dx_hat_norm,ds_hat_norm,primal_residual,dual_residual,theta_bound,"
         "step_length,damped,premises_held\n";
  for (const auto& r : trace.records) {
    const double cols[] = {r.sigma,        r.mu_before,   r.mu_after,
                           r.d_before,     r.d_after,     r.lambda_min_x,
                           r.lambda_min_s, r.delta_i,     r.injected_error,
                           r.kappa_i,      r.zeta_i,      r.dx_norm,
                           r.ds_norm,      r.dx_hat_norm, r.ds_hat_norm,
                           r.primal_residual, r.dual_residual, r.theta_bound,
                           r.step_length};
    out << r.index;
    for (double v : cols) out << ',' << format_double(v);
    out << ',' << (r.damped ? 1 : 0) << ',' << (r.premises_held ? 1 : 0)
        << '\n';
  }
}

}  // namespace qipm
