#include "mdt/dt.hpp"

#include <pybind11/complex.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>

namespace py = pybind11;
using namespace mdt;
using cyclo::CyclotomicValue;

namespace {

py::object to_pyint(const Integer& z) { return py::module_::import("builtins").attr("int")(z.get_str()); }

py::object to_fraction(const Rational& r) {
    return py::module_::import("fractions").attr("Fraction")(r.get_str());
}

quiver::CountOptions options(double budget, unsigned threads) {
    quiver::CountOptions o;
    o.budget = budget;
    o.threads = threads;
    return o;
}

std::string dump(const dt::CheckReport& r) { return r.to_json(false).dump(); }

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact finite-field exponential sums for quivers with potential";

    py::register_exception<Error>(m, "Error");
    py::register_exception<BudgetExceeded>(m, "BudgetExceeded");

    py::class_<CyclotomicValue>(m, "CyclotomicValue")
        .def_property_readonly("conductor", &CyclotomicValue::conductor)
        .def_property_readonly("coeffs",
                               [](const CyclotomicValue& v) {
                                   py::list out;
                                   for (const auto& c : v.coeffs()) out.append(to_fraction(c));
                                   return out;
                               })
        .def("is_zero", &CyclotomicValue::is_zero)
        .def("rational",
             [](const CyclotomicValue& v) -> py::object {
                 Rational r;
                 if (!v.is_rational(&r)) return py::none();
                 return to_fraction(r);
             })
        .def("__complex__",
             [](const CyclotomicValue& v) { return std::complex<double>(v.approx_real(), v.approx_imag()); })
        .def("conj", &CyclotomicValue::conj)
        .def(py::self == py::self)
        .def(py::self != py::self)
        .def(py::self + py::self)
        .def(py::self - py::self)
        .def(py::self * py::self)
        .def("__str__", &CyclotomicValue::to_string)
        .def("__repr__", [](const CyclotomicValue& v) { return "CyclotomicValue(" + v.to_string() + ")"; });

    m.def("gauss_sum", &cyclo::gauss_sum, py::arg("p"), py::arg("k") = 1);
    m.def("power_character_sum", &cyclo::power_character_sum, py::arg("d"), py::arg("p"), py::arg("k") = 1);
    m.def("gl_order", [](unsigned n, unsigned q) { return to_pyint(quiver::gl_order(n, Integer(q))); },
          py::arg("n"), py::arg("q"));
    m.def(
        "commuting_twisted_count",
        [](unsigned n, std::uint32_t p, unsigned k, const std::string& twist, const std::string& backend,
           double budget, unsigned threads) {
            return quiver::commuting_twisted_count(n, p, k, quiver::Potential::parse(twist),
                                                   quiver::parse_backend(backend), options(budget, threads));
        },
        py::arg("n"), py::arg("p"), py::arg("k") = 1, py::arg("twist") = "", py::arg("backend") = "classes",
        py::arg("budget") = kDefaultBudget, py::arg("threads") = 1);
    m.def(
        "nc_hilb_twisted_count",
        [](unsigned n, std::uint32_t p, unsigned k, const std::string& w, double budget, unsigned threads) {
            return quiver::nc_hilb_twisted_count(n, p, k, quiver::Potential::parse(w), options(budget, threads));
        },
        py::arg("n"), py::arg("p"), py::arg("k") = 1, py::arg("potential") = "a b c, -1 a c b",
        py::arg("budget") = kDefaultBudget, py::arg("threads") = 1);

    // checks return the JSON report as a string
    m.def(
        "check_cmps",
        [](unsigned d, std::uint32_t p, unsigned nmax, unsigned K, const std::string& backend, double budget) {
            return dump(dt::check_cmps(d, p, nmax, K, quiver::parse_backend(backend), options(budget, 1)));
        },
        py::arg("d"), py::arg("p"), py::arg("nmax"), py::arg("K"), py::arg("backend") = "classes",
        py::arg("budget") = kDefaultBudget);
    m.def(
        "check_feit_fine",
        [](const std::vector<unsigned>& q, unsigned nmax, unsigned brute_nmax, double budget) {
            return dump(dt::check_feit_fine(q, nmax, brute_nmax, options(budget, 1)));
        },
        py::arg("q"), py::arg("nmax"), py::arg("brute_nmax") = 2, py::arg("budget") = kDefaultBudget);
    m.def(
        "check_dimred",
        [](const std::string& poly, const std::vector<std::string>& fiber, std::uint32_t p, unsigned kmax,
           double budget) {
            return dump(dt::check_dimred(dt::WeightedFunction::parse(poly, fiber), p, kmax, options(budget, 1)));
        },
        py::arg("poly"), py::arg("fiber") = std::vector<std::string>{}, py::arg("p") = 3, py::arg("kmax") = 1,
        py::arg("budget") = kDefaultBudget);
    m.def(
        "check_wallcross",
        [](std::uint32_t p, unsigned nmax, unsigned d, double budget) {
            return dump(dt::check_wallcross(p, nmax, d, quiver::Backend::classes, options(budget, 1)));
        },
        py::arg("p"), py::arg("nmax"), py::arg("d") = 2, py::arg("budget") = kDefaultBudget);
    m.def(
        "check_preprojective",
        [](const std::string& twist, std::uint32_t p, unsigned nmax, unsigned K, double budget) {
            return dump(dt::check_preprojective(quiver::Potential::parse(twist), p, nmax, K, quiver::Backend::classes,
                                                options(budget, 1)));
        },
        py::arg("twist"), py::arg("p"), py::arg("nmax"), py::arg("K"), py::arg("budget") = kDefaultBudget);
    m.def(
        "check_sigma_oracle",
        [](unsigned d, std::uint32_t p, unsigned nmax, unsigned kmax) {
            return dump(dt::check_sigma_oracle(d, p, nmax, kmax));
        },
        py::arg("d"), py::arg("p"), py::arg("nmax"), py::arg("kmax") = 1);
    m.def(
        "check_classes",
        [](const std::vector<unsigned>& q, unsigned nmax, unsigned brute_nmax) {
            return dump(dt::check_classes(q, nmax, brute_nmax));
        },
        py::arg("q"), py::arg("nmax"), py::arg("brute_nmax") = 2);
}
