// Python bindings: specifications are parsed once into a Spec handle; queries are
// referenced by section name or given inline in query syntax.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "obdm/chase.hpp"
#include "obdm/eval.hpp"
#include "obdm/frontend.hpp"
#include "obdm/oracle.hpp"
#include "obdm/rewriting.hpp"

namespace py = pybind11;
using namespace obdm;

namespace {

struct Spec {
  SpecDocument doc;

  ConjunctiveQuery resolve(const std::string& q) const {
    if (q.find(":-") != std::string::npos) return parse_query(q);
    return doc.query(q);
  }
};

py::tuple tuple_of(const Tuple& t) {
  py::tuple out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = to_string(t[i]);
  return out;
}

py::list instance_of(const Instance& inst) {
  py::list out;
  for (const auto& a : inst.atoms()) out.append(to_string(a));
  return out;
}

Variant variant_of(const std::string& s) {
  if (s == "complete") return Variant::Complete;
  if (s == "sound") return Variant::Sound;
  if (s == "exact") return Variant::Exact;
  throw Error("unknown variant '" + s + "'");
}

Semantics semantics_of(const std::string& s) {
  if (s == "model") return Semantics::Model;
  if (s == "cert") return Semantics::Cert;
  throw Error("unknown semantics '" + s + "'");
}

}  // namespace

PYBIND11_MODULE(obdm, m) {
  m.doc() = "Complete rewritings of source queries over OBDM specifications";

  auto error = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", error.ptr());

  py::class_<Spec>(m, "Spec")
      .def_static(
          "parse", [](const std::string& text) { return Spec{parse_spec(text, "<string>")}; }, py::arg("text"))
      .def_static(
          "load", [](const std::string& path) { return Spec{load_spec(path)}; }, py::arg("path"))
      .def_property_readonly("queries",
                             [](const Spec& s) {
                               std::vector<std::string> names;
                               for (const auto& [n, _] : s.doc.queries) names.push_back(n);
                               return names;
                             })
      .def("query", [](const Spec& s, const std::string& name) { return to_string(s.doc.query(name), name); })
      .def("__str__", [](const Spec& s) { return print_spec(s.doc); });

  m.def(
      "find_complete",
      [](const Spec& s, const std::string& qs, bool minimize, const std::string& name) {
        FindOptions opts;
        opts.minimize = minimize;
        return to_string(find_optimal_complete(s.doc.spec, s.resolve(qs), opts), name);
      },
      py::arg("spec"), py::arg("source_query"), py::arg("minimize") = false, py::arg("name") = "qg");

  m.def(
      "check_complete",
      [](const Spec& s, const std::string& qs, const std::string& qg) {
        return check_complete(s.doc.spec, s.resolve(qs), s.resolve(qg));
      },
      py::arg("spec"), py::arg("source_query"), py::arg("onto_query"));

  m.def(
      "certain_answers",
      [](const Spec& s, const std::string& facts, const std::string& q) {
        std::vector<py::tuple> out;
        for (const auto& t : certain_answers(s.doc.spec, parse_db(facts, "<facts>"), s.resolve(q)))
          out.push_back(tuple_of(t));
        return out;
      },
      py::arg("spec"), py::arg("facts"), py::arg("onto_query"));

  m.def(
      "chase",
      [](const Spec& s, const std::string& q) -> py::object {
        const auto qs = s.resolve(q);
        check_source_query(s.doc.spec, qs);
        auto reserved = s.doc.spec.constants();
        const auto qc = qs.constants();
        reserved.insert(qc.begin(), qc.end());
        const auto d = instance_of_query(qs, reserved);
        const auto res = abox_of(d.instance, s.doc.spec.mapping, s.doc.spec.tbox, nullptr, reserved);
        if (!res.abox) return py::none();
        return instance_of(*res.abox);
      },
      py::arg("spec"), py::arg("source_query"), "The frozen ABox of a source query, or None when the chase fails.");

  m.def(
      "oracle",
      [](const Spec& s, const std::string& qs, const std::string& qg, const std::string& variant,
         const std::string& semantics, const std::vector<std::string>& pool, const std::string& db) {
        Budget b;
        if (!pool.empty()) b.const_pool = pool;
        if (!db.empty()) b.source_databases.push_back(parse_db(db, "<facts>"));
        const auto v = oracle_check(s.doc.spec, s.resolve(qs), s.resolve(qg), variant_of(variant),
                                    semantics_of(semantics), b);
        py::dict out;
        out["holds"] = v.holds;
        out["exhaustive"] = v.exhaustive;
        if (v.witness) {
          py::dict w;
          w["reason"] = v.witness->reason;
          w["tuple"] = tuple_of(v.witness->tuple);
          w["source_db"] = instance_of(v.witness->source_db);
          w["model"] = v.witness->model ? py::object(instance_of(*v.witness->model)) : py::none();
          out["witness"] = w;
        } else {
          out["witness"] = py::none();
        }
        return out;
      },
      py::arg("spec"), py::arg("source_query"), py::arg("onto_query"), py::arg("variant") = "complete",
      py::arg("semantics") = "model", py::arg("pool") = std::vector<std::string>{}, py::arg("db") = "");
}
