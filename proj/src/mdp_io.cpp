#include "ipid/mdp_io.hpp"

#include <fstream>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

namespace ipid {

namespace {

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& msg) {
    throw Error(ErrorKind::Parse, source + ':' + std::to_string(line) + ": " + msg);
}

template <typename T>
T read_token(std::istringstream& in, const std::string& what, const std::string& source,
             std::size_t line) {
    std::string token;
    if (!(in >> token)) fail(source, line, "missing " + what);
    std::istringstream conv(token);
    T value{};
    if (!(conv >> value) || !conv.eof()) fail(source, line, "bad " + what + " '" + token + "'");
    return value;
}

}  // namespace

PeriodicMdp parse_mdp_instance(std::istream& in, const std::string& source) {
    std::optional<std::size_t> states, actions, period;
    std::optional<double> discount;
    std::optional<PeriodicMdp> mdp;
    std::vector<std::size_t> row_seen, cost_seen;  // line of the defining entry

    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::istringstream tokens(raw.substr(0, raw.find('#')));
        std::string keyword;
        if (!(tokens >> keyword)) continue;

        if (keyword == "states" || keyword == "actions" || keyword == "period") {
            if (mdp) fail(source, line, "'" + keyword + "' after the first transition or cost");
            auto& slot = keyword == "states" ? states : keyword == "actions" ? actions : period;
            if (slot) fail(source, line, "repeated '" + keyword + "'");
            const auto v = read_token<long long>(tokens, keyword, source, line);
            if (v < 1) fail(source, line, "'" + keyword + "' must be >= 1");
            slot = static_cast<std::size_t>(v);
        } else if (keyword == "discount") {
            if (mdp) fail(source, line, "'discount' after the first transition or cost");
            if (discount) fail(source, line, "repeated 'discount'");
            discount = read_token<double>(tokens, "discount", source, line);
            if (!(*discount > 0.0 && *discount <= 1.0))
                fail(source, line, "discount must lie in (0, 1]");
        } else if (keyword == "transition" || keyword == "cost") {
            if (!mdp) {
                if (!states || !actions || !period || !discount)
                    fail(source, line, "header (states, actions, period, discount) incomplete");
                mdp.emplace(*states, *actions, *period, *discount);
                row_seen.assign(*period * *states * *actions, 0);
                cost_seen.assign(row_seen.size(), 0);
            }
            const auto l = read_token<long long>(tokens, "stage", source, line);
            const auto s = read_token<long long>(tokens, "state", source, line);
            const auto a = read_token<long long>(tokens, "action", source, line);
            if (l < 0 || static_cast<std::size_t>(l) >= *period)
                fail(source, line, "stage " + std::to_string(l) + " out of range");
            if (s < 0 || static_cast<std::size_t>(s) >= *states)
                fail(source, line, "state " + std::to_string(s) + " out of range");
            if (a < 0 || static_cast<std::size_t>(a) >= *actions)
                fail(source, line, "action " + std::to_string(a) + " out of range");
            const std::size_t idx =
                (static_cast<std::size_t>(l) * *states + static_cast<std::size_t>(s)) * *actions +
                static_cast<std::size_t>(a);
            auto& seen = keyword == "transition" ? row_seen : cost_seen;
            if (seen[idx] != 0)
                fail(source, line,
                     "duplicate " + keyword + " (first on line " + std::to_string(seen[idx]) + ")");
            seen[idx] = line;

            if (keyword == "transition") {
                std::vector<double> row(*states);
                for (std::size_t j = 0; j < *states; ++j)
                    row[j] = read_token<double>(tokens, "probability " + std::to_string(j), source,
                                                line);
                double sum = 0.0;
                for (double p : row) {
                    if (!(p >= 0.0)) fail(source, line, "negative transition probability");
                    sum += p;
                }
                if (std::abs(sum - 1.0) > 1e-12)
                    fail(source, line, "transition row sums to " + std::to_string(sum));
                mdp->set_transition(l, s, a, row);
            } else {
                const double c = read_token<double>(tokens, "cost", source, line);
                if (!(c >= 0.0) || !std::isfinite(c)) fail(source, line, "cost must be finite and >= 0");
                mdp->set_cost(l, s, a, c);
            }
            std::string extra;
            if (tokens >> extra) fail(source, line, "unexpected trailing token '" + extra + "'");
        } else {
            fail(source, line, "unknown keyword '" + keyword + "'");
        }
    }
    if (!mdp) fail(source, line, "no transitions or costs");
    for (std::size_t idx = 0; idx < row_seen.size(); ++idx) {
        const std::size_t a = idx % *actions;
        const std::size_t s = (idx / *actions) % *states;
        const std::size_t l = idx / (*actions * *states);
        const std::string where = "stage " + std::to_string(l) + ", state " + std::to_string(s) +
                                  ", action " + std::to_string(a);
        if (row_seen[idx] == 0) fail(source, line, "missing transition for " + where);
        if (cost_seen[idx] == 0) fail(source, line, "missing cost for " + where);
    }
    mdp->validate();
    return *mdp;
}

PeriodicMdp load_mdp_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Parse, path + ": cannot open instance file");
    return parse_mdp_instance(in, path);
}

void write_mdp_instance(std::ostream& out, const PeriodicMdp& mdp) {
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "states " << mdp.states() << "\nactions " << mdp.actions() << "\nperiod "
        << mdp.period() << "\ndiscount " << mdp.discount() << '\n';
    for (std::size_t l = 0; l < mdp.period(); ++l)
        for (std::size_t s = 0; s < mdp.states(); ++s)
            for (std::size_t a = 0; a < mdp.actions(); ++a) {
                out << "transition " << l << ' ' << s << ' ' << a;
                for (double p : mdp.transition(l, s, a)) out << ' ' << p;
                out << "\ncost " << l << ' ' << s << ' ' << a << ' ' << mdp.cost(l, s, a) << '\n';
            }
}

}  // namespace ipid
