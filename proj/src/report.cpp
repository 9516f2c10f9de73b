#include "kernelcat/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace kernelcat::cli {
namespace {

bool is_curve(const OutJson& v) {
  if (!v.is_array() || v.empty()) return false;
  for (const auto& p : v) {
    if (!p.is_object() || !p.contains("z") || !p.contains("lower")) return false;
  }
  return true;
}

std::string scalar_text(const OutJson& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void flatten(const OutJson& v, const std::string& prefix, const std::string& query,
             std::ostringstream& out) {
  if (v.is_object()) {
    for (const auto& [key, child] : v.items()) {
      flatten(child, prefix.empty() ? key : prefix + "/" + key, query, out);
    }
  } else if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      flatten(v[i], prefix.empty() ? std::to_string(i) : prefix + "/" + std::to_string(i), query, out);
    }
  } else {
    out << csv_field(query) << ',' << csv_field(prefix) << ',' << csv_field(scalar_text(v)) << '\n';
  }
}

}  // namespace

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

double round12(double value) {
  if (!std::isfinite(value)) return value;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;
}

OutJson encode_dist(const Dist& dist) {
  OutJson out = OutJson::object();
  for (std::size_t i = 0; i < dist.space().size(); ++i) {
    out[dist.space().atom(i)] = format_rational(dist[i]);
  }
  return out;
}

OutJson encode_kernel(const Kernel& kernel) {
  OutJson out = OutJson::object();
  for (std::size_t x = 0; x < kernel.domain().size(); ++x) {
    out[kernel.domain().atom(x)] = encode_dist(kernel.row(x));
  }
  return out;
}

OutJson encode_vector(const Eigen::VectorXd& v) {
  OutJson out = OutJson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(round12(v[i]));
  return out;
}

OutJson encode_matrix(const Eigen::MatrixXd& m) {
  OutJson out = OutJson::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(encode_vector(m.row(r).transpose()));
  return out;
}

OutJson encode_gaussian(const Gaussian& g) {
  OutJson out = OutJson::object();
  out["mean"] = encode_vector(g.mean());
  out["cov"] = encode_matrix(g.cov());
  return out;
}

OutJson encode_curve(const std::vector<CurvePoint>& curve) {
  OutJson out = OutJson::array();
  for (const auto& p : curve) {
    OutJson row = OutJson::object();
    row["z"] = round12(p.z);
    row["mean"] = round12(p.mean);
    row["lower"] = round12(p.lower);
    row["upper"] = round12(p.upper);
    out.push_back(std::move(row));
  }
  return out;
}

OutJson to_json(const Report& report) {
  OutJson out = OutJson::object();
  out["report_version"] = 1;
  out["model"] = OutJson{{"kind", report.kind}, {"digest", report.digest}};
  out["seed"] = report.seed;
  OutJson results = OutJson::array();
  for (const auto& r : report.results) {
    OutJson item = OutJson::object();
    item["id"] = r.id;
    item["type"] = r.type;
    if (r.ok) {
      item["status"] = "ok";
      item["value"] = r.value;
    } else {
      item["status"] = "error";
      item["error"] = OutJson{{"code", r.error_code}, {"message", r.error_message}};
    }
    results.push_back(std::move(item));
  }
  out["results"] = std::move(results);
  out["diagnostics"] = OutJson{{"zero_mass_atoms", report.zero_mass_atoms},
                               {"jitter_applied", report.jitter_applied}};
  return out;
}

std::string to_csv(const Report& report) {
  std::ostringstream out;
  bool curves = !report.results.empty();
  for (const auto& r : report.results) curves = curves && r.ok && is_curve(r.value);
  if (curves) {
    out << "query,z,mean,lower,upper\n";
    for (const auto& r : report.results) {
      for (const auto& p : r.value) {
        out << csv_field(r.id) << ',' << p["z"].dump() << ',' << p["mean"].dump() << ','
            << p["lower"].dump() << ',' << p["upper"].dump() << '\n';
      }
    }
    return out.str();
  }
  out << "query,path,value\n";
  for (const auto& r : report.results) {
    if (r.ok) {
      flatten(r.value, "", r.id, out);
    } else {
      out << csv_field(r.id) << ",error," << csv_field(r.error_code + ": " + r.error_message) << '\n';
    }
  }
  return out.str();
}

}  // namespace kernelcat::cli
