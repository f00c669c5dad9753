#include "mdt/cli.hpp"

#include "mdt/dt.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace mdt::cli {

namespace {

struct RunConfig {
    std::uint32_t p = 5;
    unsigned d = 2;
    unsigned nmax = 2;
    unsigned kmax = 1;
    std::string backend = "classes";
    double budget = kDefaultBudget;
    std::string out;
    std::string format;
    unsigned threads = 1;
    bool timing = false;
    std::vector<unsigned> q{2, 3, 5};
    std::string poly;
    std::vector<std::string> fiber;
    std::string twist;
    std::string quiver_file;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Twist in b, c from a quiver file holding the three-loop quiver with [a,b]c + W'.
quiver::Potential twist_from_file(const std::string& path) {
    const auto qp = quiver::parse_quiver(read_file(path));
    const auto& arrows = qp.quiver.arrows();
    if (qp.quiver.vertices().size() != 1 || arrows.size() != 3)
        throw InvalidParameter("expected one vertex with the loops a, b, c");
    for (const auto& a : {"a", "b", "c"})
        if (!qp.quiver.has_arrow(a)) throw InvalidParameter(std::string("missing loop ") + a);
    return dt::split_tripled(qp.potential);
}

// d with twist = c^d, or 0 for the zero twist.
unsigned power_of(const quiver::Potential& twist) {
    if (twist.is_zero()) return 0;
    const auto& t = twist.terms();
    if (t.size() == 1 && t[0].coeff == 1)
        if (std::all_of(t[0].word.begin(), t[0].word.end(), [](const std::string& l) { return l == "c"; }))
            return static_cast<unsigned>(t[0].word.size());
    throw InvalidParameter("this check needs a twist of the form c^d");
}

void validate(const RunConfig& c, bool check_p) {
    if (c.budget <= 0) throw InvalidParameter("budget must be positive");
    if (check_p) {
        if (!is_prime(c.p)) throw InvalidParameter("p must be prime");
        if (c.nmax >= c.p) throw InvalidParameter("nmax must be below p");
    }
    if (c.kmax == 0) throw InvalidParameter("kmax must be positive");
    if (!c.format.empty() && c.format != "json" && c.format != "csv" && c.format != "pretty")
        throw InvalidParameter("format must be json, csv or pretty");
}

int emit(const dt::CheckReport& rep, const RunConfig& c) {
    if (!c.out.empty()) {
        std::ofstream f(c.out, std::ios::binary);
        if (!f) throw InvalidParameter("cannot write " + c.out);
        f << rep.format(c.format.empty() ? "json" : c.format, c.timing);
        std::cout << rep.to_pretty();
    } else {
        std::cout << rep.format(c.format.empty() ? "pretty" : c.format, c.timing);
    }
    if (rep.budget_exceeded()) return 3;
    return rep.pass() ? 0 : 1;
}

} // namespace

int run(int argc, char** argv) {
    CLI::App app{"Finite-field checks of motivic DT identities for quivers with potential"};
    app.require_subcommand(1);
    RunConfig c;

    auto common = [&](CLI::App* s, bool with_p = true) {
        if (with_p) s->add_option("--p", c.p, "prime");
        s->add_option("--nmax", c.nmax, "largest dimension n");
        s->add_option("--kmax", c.kmax, "level budget");
        s->add_option("--budget", c.budget, "largest number of points any single enumeration may visit");
        s->add_option("--out", c.out, "write the report to this file");
        s->add_option("--format", c.format, "json, csv or pretty")->check(CLI::IsMember({"json", "csv", "pretty"}));
        s->add_option("--threads", c.threads, "worker threads for the exponential sums")->check(CLI::PositiveNumber);
        s->add_flag("--timing", c.timing, "record wall-clock per row");
    };
    auto backend = [&](CLI::App* s) {
        s->add_option("--backend", c.backend, "brute or classes")->check(CLI::IsMember({"brute", "classes"}));
    };

    auto* cmps = app.add_subcommand("cmps", "DT invariants of [a,b]c + c^d against the closed form");
    common(cmps);
    backend(cmps);
    cmps->add_option("--d", c.d, "power of c");
    cmps->add_option("--quiver", c.quiver_file, "quiver file with potential [a,b]c + c^d");

    auto* ff = app.add_subcommand("feit-fine", "commuting-variety generating function");
    common(ff, false);
    ff->add_option("--q", c.q, "prime powers")->delimiter(',');

    auto* dimred = app.add_subcommand("dimred", "dimensional reduction shadow");
    common(dimred);
    backend(dimred);
    dimred->add_option("--poly", c.poly, "polynomial g(x, t); without it the matrix form Tr([A,B]C + C^d) is used");
    dimred->add_option("--fiber", c.fiber, "fiber variables (default: names starting with t)")->delimiter(',');
    dimred->add_option("--d", c.d, "power of C in the matrix form");
    dimred->add_option("--quiver", c.quiver_file, "quiver file for the matrix form");

    auto* wall = app.add_subcommand("wallcross", "framed against unframed times ncHilb counts");
    common(wall);
    backend(wall);
    wall->add_option("--d", c.d, "power of c (0 for [a,b]c alone)");
    wall->add_option("--quiver", c.quiver_file, "quiver file with potential [a,b]c + c^d");

    auto* pre = app.add_subcommand("preproj", "commuting counts with a twist against the diagonal prediction");
    common(pre);
    backend(pre);
    pre->add_option("--twist", c.twist, "twist in b, c, e.g. \"c b b\"");
    pre->add_option("--quiver", c.quiver_file, "quiver file with potential [a,b]c + W'");

    auto* sig = app.add_subcommand("sigma-oracle", "sigma operations against symmetric-power sums");
    common(sig);
    sig->add_option("--d", c.d, "power");

    auto* cls = app.add_subcommand("classes", "conjugacy-class and orthogonality counts");
    common(cls, false);
    cls->add_option("--q", c.q, "prime powers")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        quiver::CountOptions opts;
        opts.budget = c.budget;
        opts.threads = c.threads;
        const auto be = quiver::parse_backend(c.backend);
        dt::CheckReport rep;
        if (cmps->parsed()) {
            validate(c, true);
            if (!c.quiver_file.empty()) c.d = power_of(twist_from_file(c.quiver_file));
            rep = dt::check_cmps(c.d, c.p, c.nmax, c.kmax, be, opts);
        } else if (ff->parsed()) {
            validate(c, false);
            rep = dt::check_feit_fine(c.q, c.nmax, std::min(c.nmax, 2u), opts);
        } else if (dimred->parsed()) {
            validate(c, false);
            if (!is_prime(c.p)) throw InvalidParameter("p must be prime");
            if (!c.poly.empty()) {
                rep = dt::check_dimred(dt::WeightedFunction::parse(c.poly, c.fiber), c.p, c.kmax, opts);
            } else {
                auto twist = c.quiver_file.empty() ? (c.d >= 2 ? quiver::power_twist(c.d) : quiver::Potential())
                                                   : twist_from_file(c.quiver_file);
                rep = dt::check_dimred_matrix(twist, c.nmax, c.p, c.kmax, be, opts);
            }
        } else if (wall->parsed()) {
            validate(c, true);
            if (!c.quiver_file.empty()) c.d = power_of(twist_from_file(c.quiver_file));
            rep = dt::check_wallcross(c.p, c.nmax, c.d, be, opts);
        } else if (pre->parsed()) {
            validate(c, true);
            auto twist = c.quiver_file.empty() ? quiver::Potential::parse(c.twist) : twist_from_file(c.quiver_file);
            rep = dt::check_preprojective(twist, c.p, c.nmax, c.kmax, be, opts);
        } else if (sig->parsed()) {
            validate(c, false);
            rep = dt::check_sigma_oracle(c.d, c.p, c.nmax, c.kmax, opts);
        } else if (cls->parsed()) {
            validate(c, false);
            rep = dt::check_classes(c.q, c.nmax, std::min(c.nmax, 2u), opts);
        }
        return emit(rep, c);
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace mdt::cli
