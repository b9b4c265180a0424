#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "volflow/fig8.hpp"
#include "volflow/variation.hpp"

// File formats: the cusp-jet JSON schema consumed by `rate`, the path spec
// consumed by `fig8`, and CSV/JSON emission for reports.  Complex numbers are
// [re, im] pairs; matrices are row-major; CSV uses '.' decimals, no locale.

namespace volflow {

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct JetFile {
  int n = 0;
  std::vector<CuspJet> cusps;
};

// { "n": int, "cusps": [ { "a": [[[re,im],...],...], "b": ..., "da": ..., "db": ... } ] }
JetFile parse_jet_file(const std::string& json_text);

std::string jet_file_to_json(const JetFile& jf);

// Either { "u0": [re,im], "kind": "radial"|"circle"|"list", "samples": int,
// "list": [[re,im],...] } or a bare array of [re,im] samples.
PathSpec parse_path_spec(const std::string& json_text);

// header: t,u_re,u_im,v_re,v_im,vol,rate,rate_fd,int_rate
std::string report_to_csv(const DeformationReport& rep);
std::string report_to_json(const DeformationReport& rep);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace volflow
