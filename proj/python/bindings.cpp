#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "yflow/diagnostics.hpp"
#include "yflow/io.hpp"
#include "yflow/scenario.hpp"

namespace py = pybind11;
using namespace yflow;

namespace {

struct Grid {
  GridPtr ptr;
};

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<py::ssize_t> shape_of(const GridSpec& g) { return {g.sizes().begin(), g.sizes().end()}; }

ScalarField to_field(const Grid& grid, const Array& a) {
  if (static_cast<std::size_t>(a.size()) != grid.ptr->size())
    throw InvalidArgument("array has " + std::to_string(a.size()) + " values, grid has " +
                          std::to_string(grid.ptr->size()));
  return ScalarField(grid.ptr, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const ScalarField& f) {
  Array out(shape_of(f.grid()));
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

SubdomainMask to_mask(const Grid& grid, const py::array_t<bool, py::array::c_style | py::array::forcecast>& a) {
  if (static_cast<std::size_t>(a.size()) != grid.ptr->size()) throw InvalidArgument("mask size does not match grid");
  std::vector<std::uint8_t> inside(a.data(), a.data() + a.size());
  return SubdomainMask(grid.ptr, std::move(inside));
}

py::array_t<bool> mask_array(const SubdomainMask& m) {
  py::array_t<bool> out(shape_of(m.grid()));
  auto* p = out.mutable_data();
  for (std::size_t i = 0; i < m.size(); ++i) p[i] = m.contains(i);
  return out;
}

py::dict records_dict(const Trajectory& traj) {
  const auto cols = csv_columns(traj.lp_orders);
  std::vector<std::vector<double>> data(cols.size());
  for (const auto& r : traj.records) {
    std::size_t c = 0;
    for (double v : {r.t, r.dt, r.energy, r.min_u, r.max_u, r.volume_g, r.residual_sup}) data[c++].push_back(v);
    for (double v : r.residual_lp) data[c++].push_back(v);
    data[c].push_back(r.dissipation_cum);
  }
  py::dict d;
  for (std::size_t c = 0; c < cols.size(); ++c) d[py::str(cols[c])] = py::array_t<double>(data[c].size(), data[c].data());
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Prescribed scalar curvature Yamabe flow on periodic grids";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<Grid>(m, "Grid")
      .def(py::init([](std::vector<int> sizes, std::vector<double> lengths) {
             return Grid{GridSpec::make(std::move(sizes), std::move(lengths))};
           }),
           py::arg("sizes"), py::arg("lengths"))
      .def_property_readonly("dim", [](const Grid& g) { return g.ptr->dim(); })
      .def_property_readonly("shape", [](const Grid& g) { return std::vector<int>(g.ptr->sizes().begin(), g.ptr->sizes().end()); })
      .def_property_readonly("spacings", [](const Grid& g) {
        return std::vector<double>(g.ptr->spacings().begin(), g.ptr->spacings().end());
      })
      .def_property_readonly("cell_volume", [](const Grid& g) { return g.ptr->cell_volume(); })
      .def("coordinates", [](const Grid& g) {
        const auto& s = *g.ptr;
        std::vector<py::ssize_t> shape = shape_of(s);
        shape.push_back(s.dim());
        py::array_t<double> out(shape);
        auto* p = out.mutable_data();
        for (std::size_t i = 0; i < s.size(); ++i) {
          const auto x = s.coordinates(i);
          std::copy(x.begin(), x.end(), p + i * s.dim());
        }
        return out;
      });

  py::class_<SubdomainMask>(m, "Mask")
      .def(py::init([](const Grid& g, const py::array_t<bool, py::array::c_style | py::array::forcecast>& a) {
        return to_mask(g, a);
      }))
      .def("count", &SubdomainMask::count)
      .def("array", &mask_array);

  py::class_<Background>(m, "Background")
      .def(py::init([](const Grid& g, const Array& R0, const Array& f) {
             return Background(to_field(g, R0), to_field(g, f));
           }),
           py::arg("grid"), py::arg("R0"), py::arg("f"))
      .def_property_readonly("n", &Background::n)
      .def_property_readonly("c_n", &Background::c_n)
      .def_property_readonly("N", &Background::N)
      .def_property_readonly("grid", [](const Background& bg) { return Grid{bg.grid_ptr()}; });

  auto field_of = [](const Background& bg, const Array& a) { return to_field(Grid{bg.grid_ptr()}, a); };

  m.def("laplacian", [=](const Background& bg, const Array& w) { return to_array(laplacian(field_of(bg, w))); });
  m.def("conformal_op",
        [=](const Background& bg, const Array& w) { return to_array(conformal_op(bg, field_of(bg, w))); });
  m.def("scalar_curvature",
        [=](const Background& bg, const Array& u) { return to_array(scalar_curvature(bg, field_of(bg, u))); });
  m.def("energy", [=](const Background& bg, const Array& u) { return energy(bg, field_of(bg, u)); });
  m.def("stationary_residual",
        [=](const Background& bg, const Array& u) { return stationary_residual(bg, field_of(bg, u)); });
  m.def("velocity", [=](const Background& bg, const Array& u) { return to_array(velocity(bg, field_of(bg, u))); });
  m.def("stable_dt", [=](const Background& bg, const Array& u, double cfl) { return stable_dt(bg, field_of(bg, u), cfl); },
        py::arg("bg"), py::arg("u"), py::arg("cfl_fraction") = 0.9);

  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("outcome", [](const Trajectory& t) { return std::string(to_string(t.outcome)); })
      .def_property_readonly("t", [](const Trajectory& t) { return t.final_state.t; })
      .def_property_readonly("steps", [](const Trajectory& t) { return t.final_state.step; })
      .def_property_readonly("u", [](const Trajectory& t) { return to_array(t.final_state.u); })
      .def_property_readonly("lp_orders", [](const Trajectory& t) { return t.lp_orders; })
      .def_property_readonly("records", &records_dict);

  m.def(
      "run",
      [=](const Background& bg, const Array& u0, double cfl, double t_max, double residual_stop, double ceiling,
          int record_every, long long max_steps) {
        FlowConfig cfg;
        cfg.cfl_fraction = cfl;
        cfg.t_max = t_max;
        cfg.residual_stop = residual_stop;
        cfg.blowup_ceiling = ceiling;
        cfg.record_every = record_every;
        cfg.max_steps = max_steps;
        const auto u = field_of(bg, u0);
        py::gil_scoped_release release;
        return run(bg, u, cfg);
      },
      py::arg("bg"), py::arg("u0"), py::arg("cfl_fraction") = 0.9, py::arg("t_max") = 10.0,
      py::arg("residual_stop") = 1e-8, py::arg("blowup_ceiling") = 1e6, py::arg("record_every") = 1,
      py::arg("max_steps") = -1);

  m.def("dissipation_identity_error", &dissipation_identity_error);
  m.def("growth_fit", [](const Trajectory& t) {
    const auto g = growth_fit(t);
    py::dict d;
    d["exponent"] = g.exponent;
    d["r_squared"] = g.r_squared;
    d["window"] = py::make_tuple(g.t_begin, g.t_end);
    return d;
  });

  py::class_<EigenResult>(m, "EigenResult")
      .def_readonly("lambda_", &EigenResult::lambda)
      .def_readonly("residual", &EigenResult::residual)
      .def_readonly("iterations", &EigenResult::iterations)
      .def_readonly("empty_domain", &EigenResult::empty_domain)
      .def_property_readonly("phi", [](const EigenResult& e) { return to_array(e.phi); });

  m.def("dirichlet_eigen",
        [](const Background& bg, const SubdomainMask& mask, double tol) { return dirichlet_eigen(bg, mask, tol); },
        py::arg("bg"), py::arg("mask"), py::arg("tol") = 1e-9);
  m.def("superlevel_mask", &superlevel_mask, py::arg("bg"), py::arg("eps"));
  m.def(
      "check_hypotheses",
      [](const Background& bg, const SubdomainMask& omega, int dilation, int band) {
        SupersolutionOptions opt;
        opt.dilation = dilation;
        opt.band = band;
        const auto r = check_hypotheses(bg, omega, opt);
        py::dict d;
        d["lambda_omega"] = r.lambda_omega;
        d["h1"] = r.h1_holds;
        d["h2"] = r.h2_holds;
        d["h2_evaluated"] = r.h2_evaluated;
        d["c_omega"] = r.c_omega;
        d["sup_f_omega"] = r.sup_f_omega;
        d["inf_absf_complement"] = r.inf_absf_complement;
        return d;
      },
      py::arg("bg"), py::arg("omega"), py::arg("dilation") = 2, py::arg("band") = 2);

  py::class_<SupersolutionCertificate>(m, "SupersolutionCertificate")
      .def_property_readonly("ubar", [](const SupersolutionCertificate& c) { return to_array(c.ubar); })
      .def_readonly("delta", &SupersolutionCertificate::delta)
      .def_readonly("m0", &SupersolutionCertificate::m0)
      .def_readonly("m1", &SupersolutionCertificate::m1)
      .def_readonly("lambda_D", &SupersolutionCertificate::lambda_D)
      .def_readonly("min_L_ubar", &SupersolutionCertificate::min_L_ubar)
      .def_readonly("delta_lo", &SupersolutionCertificate::delta_lo)
      .def_readonly("delta_hi", &SupersolutionCertificate::delta_hi)
      .def_readonly("c_omega", &SupersolutionCertificate::c_omega);

  m.def("build_supersolution",
        [](const Background& bg, const SubdomainMask& omega, int dilation, int band) {
          return build_supersolution(bg, omega, dilation, band);
        },
        py::arg("bg"), py::arg("omega"), py::arg("dilation") = 2, py::arg("band") = 2);

  m.def("weighted_mass", [=](const Background& bg, const Array& u, const Array& phi, const SubdomainMask& mask) {
    return weighted_mass(bg, field_of(bg, u), field_of(bg, phi), mask);
  });

  m.def("load_scenario", [](const std::filesystem::path& path) {
    const auto sc = load_scenario(path);
    py::dict d;
    d["name"] = sc.name;
    d["background"] = sc.bg();
    d["u0"] = to_array(sc.u0);
    d["t_max"] = sc.flow.t_max;
    return d;
  });
}
