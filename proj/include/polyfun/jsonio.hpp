#pragma once

#include <string>

#include <json.hpp>

#include "polyfun/oka.hpp"

namespace polyfun {

using nlohmann::json;

// Complex scalars travel as [re, im]; points as arrays of them.

json to_json(const Complex& z);
json to_json(const std::vector<Complex>& v);
json to_json(const CMatrix& m);
json to_json(const PolyMap& p);
json to_json(const Polynomial& p);
json to_json(const Box& b);
json to_json(const FiniteSample& s);
json to_json(const GenericTuple& t);
json to_json(const PickInstance& inst);
json to_json(const AglerCertificate& c);
json to_json(const Realization& r);
json to_json(const ExtensionResult& r);

Complex complex_from_json(const json& j);
std::vector<Complex> cvector_from_json(const json& j);
CMatrix cmatrix_from_json(const json& j);
PolyMap polymap_from_json(const json& j);
Polynomial polynomial_from_json(const json& j);
Box box_from_json(const json& j);
FiniteSample sample_from_json(const json& j);
GenericTuple generic_tuple_from_json(const json& j);
PickInstance instance_from_json(const json& j);
AglerCertificate certificate_from_json(const json& j);
Realization realization_from_json(const json& j);
ExtensionResult extension_from_json(const json& j);

/// Parses a file, wrapping parse failures with the path and position.
json load_json(const std::string& path);
void save_json(const std::string& path, const json& j);

/// Stamps the schema tag every emitted document carries.
json stamped(json j);

}  // namespace polyfun
