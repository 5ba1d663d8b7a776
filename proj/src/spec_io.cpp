#include "tworate/spec_io.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <unistd.h>

#include "json.hpp"

namespace tworate {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw SpecError(fmt::format("{}: {}", path.empty() ? "<root>" : path, what));
}

const json& field(const json& obj, const std::string& path, const char* name) {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(name);
    if (it == obj.end()) fail(path.empty() ? name : path + "." + name, "missing required field");
    return *it;
}

std::string child(const std::string& path, const char* name) { return path.empty() ? name : path + "." + name; }
std::string child(const std::string& path, std::size_t index) { return fmt::format("{}[{}]", path, index); }

double number(const json& obj, const std::string& path, const char* name) {
    const json& v = field(obj, path, name);
    if (!v.is_number()) fail(child(path, name), "expected a number");
    return v.get<double>();
}

const json& array(const json& obj, const std::string& path, const char* name) {
    const json& v = field(obj, path, name);
    if (!v.is_array()) fail(child(path, name), "expected an array");
    return v;
}

Polynomial polynomial(const json& obj, const std::string& path, const char* name) {
    const json& arr = array(obj, path, name);
    std::vector<double> coeffs;
    for (std::size_t k = 0; k < arr.size(); ++k) {
        if (!arr[k].is_number()) fail(child(child(path, name), k), "expected a number");
        coeffs.push_back(arr[k].get<double>());
    }
    return Polynomial(std::move(coeffs));
}

std::string kind_of(const json& doc, const std::string& path) {
    const json& kind = field(doc, path, "kind");
    if (!kind.is_string()) fail(child(path, "kind"), "expected a string");
    return kind.get<std::string>();
}

// Constructors report invariant violations with std::invalid_argument;
// re-throw them with the field path attached.
template <class F>
auto guarded(const std::string& path, F&& build) {
    try {
        return build();
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
}

StepStream parse_step(const json& doc, const std::string& path) {
    const json& arr = array(doc, path, "flows");
    std::vector<CashFlow> flows;
    for (std::size_t k = 0; k < arr.size(); ++k) {
        const std::string p = child(child(path, "flows"), k);
        flows.push_back({number(arr[k], p, "t"), number(arr[k], p, "amount")});
    }
    return guarded(child(path, "flows"), [&] { return StepStream::from_cashflows(std::move(flows)); });
}

RegulatedStream parse_piecewise(const json& doc, const std::string& path) {
    const json& arr = array(doc, path, "segments");
    std::vector<StreamSegment> segs;
    for (std::size_t k = 0; k < arr.size(); ++k) {
        const std::string p = child(child(path, "segments"), k);
        segs.push_back({number(arr[k], p, "from"), number(arr[k], p, "to"), polynomial(arr[k], p, "poly")});
    }
    return guarded(child(path, "segments"), [&] { return RegulatedStream(std::move(segs)); });
}

AccumulationFunction parse_accumulation(const json& doc, const std::string& path) {
    const std::string kind = kind_of(doc, path);
    if (kind == "constant_rate") {
        const double i = number(doc, path, "i");
        return guarded(child(path, "i"), [&] { return make_constant_rate(i); });
    }
    if (kind == "power") {
        const double x = number(doc, path, "x");
        return guarded(child(path, "x"), [&] { return make_power(x); });
    }
    if (kind == "force") {
        const json& arr = array(doc, path, "segments");
        std::vector<ForceSegment> segs;
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const std::string p = child(child(path, "segments"), k);
            segs.push_back({number(arr[k], p, "from"), number(arr[k], p, "to"), polynomial(arr[k], p, "delta_poly")});
        }
        return guarded(child(path, "segments"), [&] { return make_force_of_interest(std::move(segs)); });
    }
    if (kind == "product") {
        const json& arr = array(doc, path, "of");
        std::vector<AccumulationFunction> factors;
        for (std::size_t k = 0; k < arr.size(); ++k) factors.push_back(parse_accumulation(arr[k], child(child(path, "of"), k)));
        return AccumulationFunction::product(std::move(factors));
    }
    fail(child(path, "kind"), fmt::format("unknown accumulation kind '{}'", kind));
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SpecError(fmt::format("<root>: malformed JSON: {}", e.what()));
    }
}

std::string poly_json(const Polynomial& p) {
    std::string out = "[";
    const auto c = p.coefficients();
    for (std::size_t k = 0; k < c.size(); ++k) out += (k ? "," : "") + format_number(c[k]);
    return out + "]";
}

}  // namespace

ParsedSpec parse_spec(std::string_view text) {
    const json doc = parse_json(text);
    const std::string kind = kind_of(doc, "");
    if (kind == "step") return parse_step(doc, "");
    if (kind == "piecewise") return parse_piecewise(doc, "");
    return parse_accumulation(doc, "");
}

Stream parse_stream_spec(std::string_view text) {
    ParsedSpec spec = parse_spec(text);
    if (auto* s = std::get_if<StepStream>(&spec)) return std::move(*s);
    if (auto* r = std::get_if<RegulatedStream>(&spec)) return std::move(*r);
    throw SpecError("kind: expected a stream spec (step or piecewise)");
}

AccumulationFunction parse_accumulation_spec(std::string_view text) {
    ParsedSpec spec = parse_spec(text);
    if (auto* a = std::get_if<AccumulationFunction>(&spec)) return *a;
    throw SpecError("kind: expected an accumulation spec (constant_rate, power, force or product)");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpecError(fmt::format("{}: cannot open file", path));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string format_number(double value) {
    if (value == 0.0) value = 0.0;  // drop the sign of -0
    return fmt::format("{:.17g}", value);
}

std::string to_spec_json(const StepStream& f) {
    std::string out = R"({"kind":"step","flows":[)";
    bool first = true;
    for (const auto& cf : f.flows()) {
        out += fmt::format(R"({}{{"t":{},"amount":{}}})", first ? "" : ",", format_number(cf.t),
                           format_number(cf.amount));
        first = false;
    }
    return out + "]}";
}

std::string to_spec_json(const RegulatedStream& f) {
    std::string out = R"({"kind":"piecewise","segments":[)";
    bool first = true;
    for (const auto& seg : f.segments()) {
        out += fmt::format(R"({}{{"from":{},"to":{},"poly":{}}})", first ? "" : ",", format_number(seg.from),
                           format_number(seg.to), poly_json(seg.poly));
        first = false;
    }
    return out + "]}";
}

std::string to_spec_json(const AccumulationFunction& a) {
    using K = AccumulationFunction::Kind;
    switch (a.kind()) {
    case K::ConstantRate: return fmt::format(R"({{"kind":"constant_rate","i":{}}})", format_number(a.rate()));
    case K::Power: return fmt::format(R"({{"kind":"power","x":{}}})", format_number(a.factor()));
    case K::Force: {
        std::string out = R"({"kind":"force","segments":[)";
        bool first = true;
        for (const auto& seg : a.segments()) {
            out += fmt::format(R"({}{{"from":{},"to":{},"delta_poly":{}}})", first ? "" : ",", format_number(seg.from),
                               format_number(seg.to), poly_json(seg.delta));
            first = false;
        }
        return out + "]}";
    }
    case K::Product: {
        std::string out = R"({"kind":"product","of":[)";
        bool first = true;
        for (const auto& f : a.factors()) {
            out += (first ? "" : ",") + to_spec_json(f);
            first = false;
        }
        return out + "]}";
    }
    }
    return {};
}

void write_trajectory_csv(std::ostream& out, const BalanceTrajectory& trajectory) {
    out << "t,balance,branch\n";
    for (const auto& e : trajectory.events) {
        out << format_number(e.t) << ',' << format_number(e.balance) << ',' << to_string(e.branch) << '\n';
    }
}

void write_samples_csv(std::ostream& out, const Stream& f, std::span<const double> times) {
    out << "t,value\n";
    for (double t : times) out << format_number(t) << ',' << format_number(evaluate_stream(f, t)) << '\n';
}

void write_file_atomically(const std::string& path, std::string_view contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path tmp = target.parent_path() / fmt::format(".{}.tmp.{}", target.filename().string(), ::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error(fmt::format("{}: cannot create temporary output file", path));
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw std::runtime_error(fmt::format("{}: write failed", path));
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw std::runtime_error(fmt::format("{}: cannot move output into place", path));
    }
}

}  // namespace tworate
