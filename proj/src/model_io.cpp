#include "whitney/model_io.hpp"

#include "json.hpp"

namespace whitney {

using json = nlohmann::ordered_json;

namespace {

json vec(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

// Matrices are stored as a list of rows.
json mat(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vec(m.row(r).transpose()));
  return rows;
}

Vector read_vec(const json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string("model: ") + what + " is not an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError(std::string("model: ") + what + " has a non-numeric entry");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Matrix read_mat(const json& j, Eigen::Index cols, const char* what) {
  if (!j.is_array()) throw ParseError(std::string("model: ") + what + " is not an array");
  Matrix m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    Vector row = read_vec(j[r], what);
    if (row.size() != cols) throw ParseError(std::string("model: ") + what + " has a row of the wrong length");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

std::vector<int> read_ints(const json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string("model: ") + what + " is not an array");
  std::vector<int> out;
  for (const auto& e : j) {
    if (!e.is_number_integer()) throw ParseError(std::string("model: ") + what + " has a non-integer entry");
    out.push_back(e.get<int>());
  }
  return out;
}

json field_json(const OneField& field) {
  json f;
  f["dim"] = field.dim();
  json sites = json::array(), values = json::array(), grads = json::array();
  for (int k = 0; k < field.size(); ++k) {
    sites.push_back(vec(field.site(k)));
    values.push_back(field.value(k));
    grads.push_back(vec(field.gradient(k)));
  }
  f["sites"] = std::move(sites);
  f["values"] = std::move(values);
  f["gradients"] = std::move(grads);
  return f;
}

}  // namespace

std::string field_to_json(const OneField& field) { return field_json(field).dump(2); }

std::string model_to_json(const WellsModel& model) {
  json doc;
  doc["format"] = "whitney-model";
  doc["version"] = kModelFormatVersion;
  doc["dim"] = model.dim();
  doc["M"] = model.M;
  doc["affine"] = model.affine;
  doc["field"] = field_json(model.field);
  json shifted = json::array();
  for (const Point& p : model.shifted) shifted.push_back(vec(p));
  doc["shifted"] = std::move(shifted);
  doc["lattice_dim"] = model.lattice.dim;
  json duals = json::array();
  for (const DualVertex& v : model.lattice.dual_vertices) {
    json jv;
    jv["kind"] = v.kind == DualKind::PowerCenter ? "power_center" : "synthetic_ray";
    jv["origin_face"] = v.origin_face;
    jv["position"] = vec(v.position);
    if (v.kind == DualKind::SyntheticRay) jv["direction"] = vec(v.direction);
    duals.push_back(std::move(jv));
  }
  doc["dual_vertices"] = std::move(duals);
  json faces = json::array();
  for (const LatticeFace& f : model.lattice.faces) {
    json jf;
    jf["dim"] = f.dim;
    jf["vertices"] = f.vertices;
    jf["children"] = f.children;
    jf["parents"] = f.parents;
    jf["dual"] = f.dual_vertices;
    faces.push_back(std::move(jf));
  }
  doc["faces"] = std::move(faces);
  json cells = json::array();
  for (const WellsCell& c : model.cells) {
    json jc;
    jc["face"] = c.face;
    jc["dim"] = c.dim;
    jc["A"] = mat(c.A);
    jc["b"] = vec(c.b);
    jc["centroid"] = vec(c.centroid);
    jc["anchor"] = vec(c.anchor);
    jc["offset"] = c.offset;
    jc["basis_H"] = mat(c.basis_H.transpose());
    jc["basis_E"] = mat(c.basis_E.transpose());
    cells.push_back(std::move(jc));
  }
  doc["cells"] = std::move(cells);
  doc["warnings"] = model.warnings;
  return doc.dump(1);
}

WellsModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  try {
    if (doc.value("format", "") != "whitney-model") throw ParseError("model: not a model document");
    if (doc.value("version", -1) != kModelFormatVersion) throw ParseError("model: unsupported version");
    WellsModel model;
    const int d = doc.at("dim").get<int>();
    if (d <= 0) throw ParseError("model: bad dimension");
    const json& jf = doc.at("field");
    std::vector<Point> sites;
    std::vector<Jet> jets;
    const json& js = jf.at("sites");
    const json& jv = jf.at("values");
    const json& jg = jf.at("gradients");
    if (js.size() != jv.size() || js.size() != jg.size()) throw ParseError("model: field arrays differ in length");
    for (std::size_t k = 0; k < js.size(); ++k) {
      sites.push_back(read_vec(js[k], "site"));
      jets.push_back({jv[k].get<double>(), read_vec(jg[k], "gradient")});
    }
    model.field = OneField(d, std::move(sites), std::move(jets));
    if (auto issue = validate(model.field)) throw ParseError("model: invalid field: " + issue->message);
    model.M = doc.at("M").get<double>();
    model.affine = doc.at("affine").get<bool>();
    for (const auto& p : doc.at("shifted")) model.shifted.push_back(read_vec(p, "shifted"));
    model.lattice.dim = doc.at("lattice_dim").get<int>();
    for (const auto& v : doc.at("dual_vertices")) {
      DualVertex dv;
      std::string kind = v.at("kind").get<std::string>();
      if (kind == "power_center") {
        dv.kind = DualKind::PowerCenter;
      } else if (kind == "synthetic_ray") {
        dv.kind = DualKind::SyntheticRay;
        dv.direction = read_vec(v.at("direction"), "direction");
      } else {
        throw ParseError("model: unknown dual vertex kind " + kind);
      }
      dv.origin_face = v.at("origin_face").get<int>();
      dv.position = read_vec(v.at("position"), "position");
      model.lattice.dual_vertices.push_back(std::move(dv));
    }
    for (const auto& f : doc.at("faces")) {
      LatticeFace face;
      face.dim = f.at("dim").get<int>();
      face.vertices = read_ints(f.at("vertices"), "vertices");
      face.children = read_ints(f.at("children"), "children");
      face.parents = read_ints(f.at("parents"), "parents");
      face.dual_vertices = read_ints(f.at("dual"), "dual");
      model.lattice.faces.push_back(std::move(face));
    }
    model.lattice.reindex();
    for (const auto& c : doc.at("cells")) {
      WellsCell cell;
      cell.face = c.at("face").get<int>();
      cell.dim = c.at("dim").get<int>();
      cell.A = read_mat(c.at("A"), d, "A");
      cell.b = read_vec(c.at("b"), "b");
      if (cell.b.size() != cell.A.rows()) throw ParseError("model: A and b differ in length");
      cell.centroid = read_vec(c.at("centroid"), "centroid");
      cell.anchor = read_vec(c.at("anchor"), "anchor");
      cell.offset = c.at("offset").get<double>();
      cell.basis_H = read_mat(c.at("basis_H"), d, "basis_H").transpose();
      cell.basis_E = read_mat(c.at("basis_E"), d, "basis_E").transpose();
      if (cell.basis_H.cols() != cell.dim || cell.basis_E.cols() != d - cell.dim) {
        throw ParseError("model: basis sizes do not match the cell dimension");
      }
      if (cell.centroid.size() != d || cell.anchor.size() != d) throw ParseError("model: cell point of wrong length");
      model.cells.push_back(std::move(cell));
    }
    if (model.cells.empty()) throw ParseError("model: no cells");
    for (const auto& w : doc.at("warnings")) model.warnings.push_back(w.get<std::string>());
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
}

}  // namespace whitney
