#include "qbt/serialize.hpp"

#include <chrono>
#include <fstream>

namespace qbt {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json matrix_to_json(const ComplexMatrix& a) {
  ordered_json rows = ordered_json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Index j = 0; j < a.cols(); ++j) {
      row.push_back({a(i, j).real(), a(i, j).imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_array()) throw ShapeError("model json: matrix must be an array of rows");
  const Index rows = static_cast<Index>(j.size());
  Index cols = 0;
  if (rows > 0) cols = static_cast<Index>(j.at(0).size());
  ComplexMatrix a(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<size_t>(i));
    if (static_cast<Index>(row.size()) != cols) {
      throw ShapeError("model json: ragged matrix rows");
    }
    for (Index k = 0; k < cols; ++k) {
      const auto& entry = row.at(static_cast<size_t>(k));
      a(i, k) = Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
    }
  }
  return a;
}

ordered_json model_to_json(const TripleModel& model) {
  ordered_json doc;
  doc["version"] = kModelSchemaVersion;
  doc["kind"] = model.info().kind;
  doc["dims"] = {{"n", model.n()},
                 {"m", model.m()},
                 {"dD", model.dim_d()},
                 {"dDt", model.dim_dt()}};
  doc["gram_H"] = matrix_to_json(model.space_h().gram());
  doc["gram_G"] = matrix_to_json(model.space_g().gram());
  doc["embed"] = matrix_to_json(model.embed());
  doc["embed_t"] = matrix_to_json(model.embed_t());
  doc["T"] = matrix_to_json(model.op_t());
  doc["Tt"] = matrix_to_json(model.op_tt());
  doc["G0"] = matrix_to_json(model.g0());
  doc["G1"] = matrix_to_json(model.g1());
  doc["G0t"] = matrix_to_json(model.g0t());
  doc["G1t"] = matrix_to_json(model.g1t());
  ordered_json meta;
  meta["green_defect"] = model.info().green_defect;
  if (model.info().lambda0) {
    meta["lambda0"] = {model.info().lambda0->real(), model.info().lambda0->imag()};
  } else {
    meta["lambda0"] = nullptr;
  }
  meta["symmetric"] = model.info().symmetric;
  meta["descriptor"] = model.info().descriptor;
  doc["metadata"] = std::move(meta);
  return doc;
}

TripleModel model_from_json(const json& doc) {
  if (!doc.contains("version") || doc.at("version").get<int>() != kModelSchemaVersion) {
    throw ShapeError("model json: unsupported schema version");
  }
  const auto& dims = doc.at("dims");
  const Index n = dims.at("n").get<Index>();
  const Index m = dims.at("m").get<Index>();

  WeightedSpace wh{matrix_from_json(doc.at("gram_H"))};
  WeightedSpace wg{matrix_from_json(doc.at("gram_G"))};
  if (wh.dim() != n || wg.dim() != m) {
    throw ShapeError("model json: gram shapes disagree with dims");
  }

  ModelInfo info;
  info.kind = doc.value("kind", std::string("custom"));
  const auto& meta = doc.at("metadata");
  info.symmetric = meta.value("symmetric", false);
  info.descriptor = meta.value("descriptor", info.kind);
  if (meta.contains("lambda0") && !meta.at("lambda0").is_null()) {
    info.lambda0 = Complex(meta.at("lambda0").at(0).get<double>(),
                           meta.at("lambda0").at(1).get<double>());
  }

  return TripleModel::build(std::move(wh), std::move(wg), matrix_from_json(doc.at("embed")),
                            matrix_from_json(doc.at("embed_t")),
                            matrix_from_json(doc.at("T")), matrix_from_json(doc.at("Tt")),
                            matrix_from_json(doc.at("G0")), matrix_from_json(doc.at("G1")),
                            matrix_from_json(doc.at("G0t")),
                            matrix_from_json(doc.at("G1t")), std::move(info));
}

void save_model(const TripleModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_model: cannot open " + path.string());
  out << model_to_json(model).dump(2) << "\n";
}

TripleModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open " + path.string());
  json doc;
  in >> doc;
  return model_from_json(doc);
}

ordered_json report_to_json(const VerificationReport& report, bool with_timestamp) {
  ordered_json doc;
  doc["version"] = 1;
  doc["model"] = report.model_descriptor;
  doc["pass"] = report.pass();
  if (with_timestamp) {
    doc["timestamp"] = static_cast<long long>(
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
  }
  ordered_json entries = ordered_json::array();
  for (const VerificationEntry& e : report.entries) {
    entries.push_back({{"name", e.name},
                       {"detail", e.detail},
                       {"defect", e.defect},
                       {"tolerance", e.tolerance},
                       {"pass", e.pass}});
  }
  doc["entries"] = std::move(entries);
  ordered_json cert;
  cert["lambda0"] = {report.lambda0.real(), report.lambda0.imag()};
  ordered_json probes = ordered_json::array();
  for (Complex p : report.probes) probes.push_back({p.real(), p.imag()});
  cert["probes"] = std::move(probes);
  cert["max_cond_stack"] = report.max_cond_stack;
  doc["certificates"] = std::move(cert);
  return doc;
}

}  // namespace qbt
