#include "volflow/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace volflow {

using nlohmann::json;

namespace {

[[noreturn]] void schema_fail(const std::string& where, const std::string& what) {
  throw SchemaError(where + ": " + what);
}

Cplx parse_complex(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    schema_fail(where, "expected [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

CMat parse_matrix(const json& j, int n, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    schema_fail(where, "expected " + std::to_string(n) + " rows");
  CMat m(n, n);
  for (int r = 0; r < n; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      schema_fail(where + "[" + std::to_string(r) + "]",
                  "expected " + std::to_string(n) + " entries");
    for (int c = 0; c < n; ++c)
      m(r, c) = parse_complex(row[c],
                              where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  return m;
}

BorelElement parse_borel(const json& j, int n, const std::string& where) {
  CMat m = parse_matrix(j, n, where);
  try {
    return BorelElement(std::move(m));
  } catch (const std::invalid_argument& e) {
    schema_fail(where, e.what());
  }
}

json complex_to_json(Cplx z) { return json::array({z.real(), z.imag()}); }

json matrix_to_json(const CMat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

JetFile parse_jet_file(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("jet file: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) schema_fail("jet file", "expected a JSON object");
  if (!doc.contains("n") || !doc["n"].is_number_integer()) schema_fail("n", "expected integer");
  const int n = doc["n"].get<int>();
  if (n < 2) schema_fail("n", "must be >= 2");
  if (!doc.contains("cusps") || !doc["cusps"].is_array() || doc["cusps"].empty())
    schema_fail("cusps", "expected nonempty array");

  JetFile jf;
  jf.n = n;
  for (std::size_t i = 0; i < doc["cusps"].size(); ++i) {
    const json& c = doc["cusps"][i];
    const std::string where = "cusps[" + std::to_string(i) + "]";
    if (!c.is_object()) schema_fail(where, "expected object");
    for (const char* key : {"a", "b", "da", "db"})
      if (!c.contains(key)) schema_fail(where + "." + key, "missing field");
    jf.cusps.emplace_back(parse_borel(c["a"], n, where + ".a"),
                          parse_borel(c["b"], n, where + ".b"),
                          parse_borel(c["da"], n, where + ".da"),
                          parse_borel(c["db"], n, where + ".db"));
  }
  return jf;
}

std::string jet_file_to_json(const JetFile& jf) {
  json doc;
  doc["n"] = jf.n;
  doc["cusps"] = json::array();
  for (const auto& c : jf.cusps) {
    json jc;
    jc["a"] = matrix_to_json(c.a.mat());
    jc["b"] = matrix_to_json(c.b.mat());
    jc["da"] = matrix_to_json(c.da.mat());
    jc["db"] = matrix_to_json(c.db.mat());
    doc["cusps"].push_back(jc);
  }
  return doc.dump(2);
}

PathSpec parse_path_spec(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("path spec: invalid JSON: ") + e.what());
  }
  PathSpec p;
  if (doc.is_array()) {
    p.kind = PathSpec::Kind::list;
    for (std::size_t i = 0; i < doc.size(); ++i)
      p.points.push_back(parse_complex(doc[i], "path[" + std::to_string(i) + "]"));
    p.samples = static_cast<int>(p.points.size());
    return p;
  }
  if (!doc.is_object()) schema_fail("path spec", "expected object or array");
  if (!doc.contains("kind") || !doc["kind"].is_string()) schema_fail("kind", "expected string");
  const std::string kind = doc["kind"].get<std::string>();
  if (kind == "radial")
    p.kind = PathSpec::Kind::radial;
  else if (kind == "circle")
    p.kind = PathSpec::Kind::circle;
  else if (kind == "list")
    p.kind = PathSpec::Kind::list;
  else
    schema_fail("kind", "must be radial, circle or list");

  if (p.kind == PathSpec::Kind::list) {
    if (!doc.contains("list") || !doc["list"].is_array()) schema_fail("list", "expected array");
    for (std::size_t i = 0; i < doc["list"].size(); ++i)
      p.points.push_back(parse_complex(doc["list"][i], "list[" + std::to_string(i) + "]"));
    p.samples = static_cast<int>(p.points.size());
  } else {
    if (!doc.contains("u0")) schema_fail("u0", "missing field");
    p.u0 = parse_complex(doc["u0"], "u0");
    if (doc.contains("samples")) {
      if (!doc["samples"].is_number_integer()) schema_fail("samples", "expected integer");
      p.samples = doc["samples"].get<int>();
    }
  }
  return p;
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

std::string report_to_csv(const DeformationReport& rep) {
  std::ostringstream os;
  os << "t,u_re,u_im,v_re,v_im,vol,rate,rate_fd,int_rate\n";
  for (const auto& r : rep.rows) {
    os << fmt(r.t) << ',' << fmt(r.u.real()) << ',' << fmt(r.u.imag()) << ','
       << fmt(r.v.real()) << ',' << fmt(r.v.imag()) << ',' << fmt(r.vol) << ',' << fmt(r.rate)
       << ',' << fmt(r.rate_fd) << ',' << fmt(r.int_rate) << '\n';
  }
  return os.str();
}

std::string report_to_json(const DeformationReport& rep) {
  json doc;
  doc["rows"] = json::array();
  for (const auto& r : rep.rows) {
    json row;
    row["t"] = r.t;
    row["u"] = complex_to_json(r.u);
    row["v"] = complex_to_json(r.v);
    row["vol"] = r.vol;
    row["rate"] = r.rate;
    row["rate_fd"] = r.rate_fd;
    row["int_rate"] = r.int_rate;
    row["residual"] = r.residual;
    doc["rows"].push_back(row);
  }
  doc["integral_rate"] = rep.integral_rate;
  doc["q_nz"] = rep.q_nz;
  doc["nz_discrepancy"] = rep.nz_discrepancy;
  doc["s_nz"] = kNzSign;
  if (rep.decay) {
    doc["decay"] = {{"radii", rep.decay->radii},
                    {"errors", rep.decay->errors},
                    {"slope", rep.decay->slope}};
  }
  return doc.dump(2);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
}

}  // namespace volflow
