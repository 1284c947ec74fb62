// Runs the full experiment suite twice and prints one PASS/FAIL line per
// acceptance criterion. Exit status 0 iff every criterion passes.

#include "chns/experiments.hpp"
#include "chns/io.hpp"
#include "chns/model.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace chns;

namespace {

struct Verdict {
    bool pass = true;
    std::vector<std::string> detail;

    void require(const ExperimentReport& r, const std::string& check)
    {
        const Check* c = r.find(check);
        if (!c) {
            pass = false;
            detail.push_back(r.name + "/" + check + " missing");
            return;
        }
        if (!c->pass)
            pass = false;
        detail.push_back(check + " = " + format_double(c->measured) + " " + c->relation + " " +
                         format_double(c->threshold) + (c->pass ? "" : "  <-- fails"));
    }

    void require_all(const ExperimentReport& r)
    {
        for (const auto& c : r.checks)
            if (c.relation != "record")
                require(r, c.name);
    }

    void require_runtime(const ExperimentReport& r, double limit)
    {
        const bool ok = r.seconds <= limit;
        pass = pass && ok;
        std::ostringstream os;
        os.precision(3);
        os << "runtime " << r.name << " = " << r.seconds << " s <= " << limit << " s" << (ok ? "" : "  <-- fails");
        detail.push_back(os.str());
    }
};

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

std::vector<fs::path> csv_files(const fs::path& root)
{
    std::vector<fs::path> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file() && e.path().extension() == ".csv")
            out.push_back(fs::relative(e.path(), root));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    fs::path out = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_output");
    const bool verbose = argc > 2 && std::string(argv[2]) == "-v";
    fs::remove_all(out);
    const fs::path run_a = out / "run_a", run_b = out / "run_b";

    ExperimentOptions opts;
    opts.seed = 1;
    opts.log = verbose ? &std::cerr : nullptr;

    std::cerr << "acceptance: first verification pass\n";
    opts.out_dir = run_a;
    fs::create_directories(run_a);
    const std::vector<ExperimentReport> reps = run_all_experiments(opts);
    std::cerr << "acceptance: second verification pass\n";
    opts.out_dir = run_b;
    fs::create_directories(run_b);
    run_all_experiments(opts);

    std::map<std::string, const ExperimentReport*> by_name;
    for (const auto& r : reps)
        by_name[r.name] = &r;
    const ExperimentReport& mass = *by_name.at("mass_law");
    const ExperimentReport& energy = *by_name.at("energy_dissipation");

    std::vector<std::pair<std::string, Verdict>> criteria;

    {
        Verdict v;
        for (const char* a : {"0", "0.5", "2"})
            v.require(mass, std::string("recurrence_alpha_") + a);
        v.require(mass, "conservation_alpha_0");
        v.require(mass, "mean_order_alpha_0.5");
        v.require(mass, "mean_order_alpha_2");
        v.require_runtime(mass, 60.0);
        criteria.emplace_back("discrete mass law", v);
    }
    {
        Verdict v;
        for (const char* a : {"0", "0.5", "2"})
            v.require(mass, std::string("nutrient_mean_alpha_") + a);
        criteria.emplace_back("nutrient mean law", v);
    }
    {
        Verdict v;
        for (const char* c : {"dissipation_nonnegative", "energy_monotone", "residual_order"})
            v.require(energy, c);
        v.require_runtime(energy, 600.0);
        criteria.emplace_back("energy law", v);
    }
    {
        Verdict v;
        const ExperimentReport& sep = *by_name.at("separation");
        for (const char* c : {"spinodal_min_margin", "spinodal_clamp_events", "stripe_min_margin",
                              "stripe_clamp_events"})
            v.require(sep, c);
        criteria.emplace_back("strict separation", v);
    }
    {
        Verdict v;
        const ExperimentReport& cd = *by_name.at("continuous_dependence");
        for (const char* c : {"gronwall_ratio_finite_eps_0.001", "gronwall_ratio_finite_eps_0.0001",
                              "gronwall_ratio_finite_eps_1e-05", "gronwall_ratio_spread"})
            v.require(cd, c);
        criteria.emplace_back("continuous dependence", v);
    }
    {
        Verdict v;
        v.require_all(*by_name.at("elliptic"));
        criteria.emplace_back("singular elliptic solver", v);
    }
    {
        Verdict v;
        const ExperimentReport& mms = *by_name.at("manufactured_convergence");
        for (const char* c : {"space_order_phi", "space_order_sigma", "space_order_velocity", "time_order_phi",
                              "time_order_sigma", "time_order_velocity"})
            v.require(mms, c);
        criteria.emplace_back("scheme consistency", v);
    }
    {
        Verdict v;
        const ExperimentReport& ops = *by_name.at("operators");
        for (const char* c : {"laplacian_sum", "advection_sum_centered", "advection_sum_upwind",
                              "laplacian_self_adjoint", "incompressibility"})
            v.require(ops, c);
        const double tol = StepperConfig{}.projection_tol;
        double worst = 0.0;
        for (const auto& r : reps)
            worst = std::max(worst, r.max_div);
        const bool ok = worst <= tol;
        v.pass = v.pass && ok;
        v.detail.push_back("max ||div v||_inf over all experiment steps = " + format_double(worst) + " <= " +
                           format_double(tol) + (ok ? "" : "  <-- fails"));
        criteria.emplace_back("operator identities", v);
    }
    {
        Verdict v;
        const auto fa = csv_files(run_a), fb = csv_files(run_b);
        if (fa != fb || fa.empty()) {
            v.pass = false;
            v.detail.push_back("CSV file sets differ between passes");
        }
        std::size_t identical = 0;
        for (const auto& f : fa) {
            if (slurp(run_a / f) == slurp(run_b / f))
                ++identical;
            else {
                v.pass = false;
                v.detail.push_back("differs: " + f.string());
            }
        }
        v.detail.push_back(std::to_string(identical) + " of " + std::to_string(fa.size()) +
                           " CSV files byte-identical");
        criteria.emplace_back("determinism", v);
    }

    bool all = true;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto& [name, v] = criteria[k];
        std::cout << "criterion " << k + 1 << " (" << name << "): " << (v.pass ? "PASS" : "FAIL") << '\n';
        for (const auto& d : v.detail)
            std::cout << "    " << d << '\n';
        all = all && v.pass;
    }
    return all ? 0 : 1;
}
