// SPDX-License-Identifier: Apache-2.0
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ssf/codec.hpp"
#include "ssf/harness.hpp"
#include "ssf/simnet.hpp"
#include "ssf/slasher.hpp"

namespace py = pybind11;
using namespace ssf;

namespace {

py::dict violation_dict(const Violation& v) {
  py::dict d;
  d["kind"] = std::string(to_string(v.kind));
  d["offender"] = v.offender;
  d["first"] = v.first->id().hex();
  d["second"] = v.second->id().hex();
  d["verified"] = v.verify();
  return d;
}

std::vector<MessagePtr> sent(const Trace& tr) {
  std::vector<MessagePtr> pool;
  for (const auto& r : tr.records) {
    if (r.kind == RecordKind::send) pool.push_back(r.message);
  }
  return pool;
}

}  // namespace

PYBIND11_MODULE(_ssf, m) {
  m.doc() = "Single-slot-finality protocol simulator";

  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
  py::register_exception<codec::DecodeError>(m, "DecodeError", PyExc_ValueError);

  py::enum_<ForkChoiceMode>(m, "ForkChoiceMode")
      .value("hfc", ForkChoiceMode::hfc)
      .value("rlmd", ForkChoiceMode::rlmd);

  py::class_<SleepInterval>(m, "SleepInterval")
      .def(py::init([](ValidatorIndex v, Round from, Round to) { return SleepInterval{v, from, to}; }),
           py::arg("validator"), py::arg("start"), py::arg("end"))
      .def_readwrite("validator", &SleepInterval::validator)
      .def_readwrite("start", &SleepInterval::from)
      .def_readwrite("end", &SleepInterval::to);

  py::class_<Corruption>(m, "Corruption")
      .def(py::init([](ValidatorIndex v, Round r) { return Corruption{v, r}; }), py::arg("validator"),
           py::arg("round"))
      .def_readwrite("validator", &Corruption::validator)
      .def_readwrite("round", &Corruption::round);

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_static("from_yaml", &parse_scenario, py::arg("text"))
      .def_static("load", [](const std::string& path) { return load_scenario(path); }, py::arg("path"))
      .def("to_yaml", [](const Scenario& sc) { return to_yaml(sc); })
      .def("validate", &Scenario::validate)
      .def_readwrite("name", &Scenario::name)
      .def_readwrite("n", &Scenario::n)
      .def_readwrite("delta", &Scenario::delta)
      .def_readwrite("gst", &Scenario::gst)
      .def_readwrite("gat", &Scenario::gat)
      .def_readwrite("eta", &Scenario::eta)
      .def_readwrite("tau", &Scenario::tau)
      .def_readwrite("kappa", &Scenario::kappa)
      .def_readwrite("horizon", &Scenario::horizon)
      .def_readwrite("seed", &Scenario::seed)
      .def_readwrite("fc_mode", &Scenario::fc_mode)
      .def_readwrite("sleep", &Scenario::sleep)
      .def_readwrite("corruption", &Scenario::corruption)
      .def_property(
          "strategy", [](const Scenario& sc) { return sc.adversary.strategy; },
          [](Scenario& sc, const std::string& s) { sc.adversary.strategy = s; })
      .def_property(
          "groups", [](const Scenario& sc) { return sc.adversary.groups; },
          [](Scenario& sc, const std::vector<std::vector<ValidatorIndex>>& g) { sc.adversary.groups = g; })
      .def_property("slot_length", &Scenario::slot_length, nullptr)
      .def("__repr__", [](const Scenario& sc) {
        return "<Scenario " + sc.name + " n=" + std::to_string(sc.n) + " horizon=" + std::to_string(sc.horizon) + ">";
      });

  py::class_<Trace>(m, "Trace")
      .def_static("parse", &Trace::parse, py::arg("text"))
      .def("text", &Trace::text, py::arg("include_fc") = true)
      .def("__len__", [](const Trace& t) { return t.records.size(); })
      .def_property_readonly("n", [](const Trace& t) { return t.header.n; })
      .def_property_readonly("total_rounds", [](const Trace& t) { return t.header.total_rounds(); })
      .def(
          "sends",
          [](const Trace& t) {
            py::list out;
            for (const auto& r : t.records) {
              if (r.kind != RecordKind::send) continue;
              out.append(py::make_tuple(r.round, r.actor.str(), std::string(to_string(r.message->kind())),
                                        r.message->id().hex()));
            }
            return out;
          },
          "(round, actor, kind, id) for every sent message");

  py::class_<Verdict>(m, "Verdict")
      .def_property_readonly("outcome", [](const Verdict& v) { return std::string(to_string(v.outcome)); })
      .def_readonly("detail", &Verdict::detail)
      .def_property_readonly("failed", &Verdict::failed)
      .def("__repr__",
           [](const Verdict& v) { return "<Verdict " + std::string(to_string(v.outcome)) + " " + v.detail + ">"; });

  m.def(
      "run", [](const Scenario& sc) { return run(sc); }, py::arg("scenario"),
      py::call_guard<py::gil_scoped_release>());
  m.def("property_names", &trace_property_names);
  m.def(
      "check", [](const Trace& tr, const std::string& name) { return run_check(name, TraceIndex(tr)); },
      py::arg("trace"), py::arg("property"));
  m.def("check_equivalence", &check_equivalence, py::arg("scenario"));
  m.def("check_determinism", &check_determinism, py::arg("scenario"));
  m.def("check_tau_sleepiness", &check_tau_sleepiness, py::arg("scenario"), py::arg("slot"));
  m.def(
      "compliance",
      [](const Scenario& sc) {
        auto rep = check_compliance(sc);
        py::dict d;
        d["failing_slots"] = rep.failing_slots;
        d["head_equivocators"] = rep.head_equivocators;
        d["compliant"] = rep.compliant();
        return d;
      },
      py::arg("scenario"));
  m.def(
      "slash_scan",
      [](const Trace& tr) {
        py::list out;
        for (const auto& v : scan(sent(tr))) out.append(violation_dict(v));
        return out;
      },
      py::arg("trace"));
  m.def(
      "accountability",
      [](const Trace& tr) {
        TraceIndex ix(tr);
        CulpritReport rep;
        rep.route = CulpritRoute::e1;
        auto v = check_accountability(ix, &rep);
        py::dict d;
        d["verdict"] = v;
        d["route"] = rep.culprits.empty() ? py::object(py::none()) : py::str(std::string(to_string(rep.route)));
        py::dict culprits;
        for (const auto& [who, viol] : rep.culprits) culprits[py::int_(who)] = violation_dict(viol);
        d["culprits"] = culprits;
        return d;
      },
      py::arg("trace"));
  m.def("quorum", &quorum, py::arg("n"));
  m.def("third", &third, py::arg("n"));
}
