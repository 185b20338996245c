#include "report_json.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace maskcheck::cli {

Json witness_json(const Witness& w) {
    Json j = Json::object();
    for (const auto& [name, value] : w.entries()) j[name] = value;
    return j;
}

Witness witness_from_json(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("witness must be a JSON object");
    Witness w;
    for (const auto& [name, value] : j.items()) {
        if (!value.is_number_unsigned()) {
            throw std::invalid_argument("witness field " + name + " is not an unsigned integer");
        }
        w.set(name, value.get<std::uint64_t>());
    }
    return w;
}

double to_ms(std::chrono::nanoseconds d) { return static_cast<double>(d.count()) / 1e6; }

Json check_json(const CheckReport& r, Json context) {
    Json j;
    j["property"] = r.property_name;
    j["verdict"] = to_string(r.verdict);
    j["mode"] = to_string(r.mode);
    if (!context.empty()) j["context"] = std::move(context);
    j["seed"] = r.seed ? Json(*r.seed) : Json(nullptr);
    j["contexts_checked"] = r.contexts_checked;
    if (r.witness) j["witness"] = witness_json(*r.witness);
    j["notes"] = r.notes;
    j["elapsed_ms"] = to_ms(r.elapsed);
    return j;
}

Json Envelope::to_json() const {
    Json j;
    j["property"] = property;
    j["verdict"] = to_string(verdict);
    j["mode"] = to_string(mode);
    j["q"] = q ? Json(*q) : Json(nullptr);
    j["k"] = k ? Json(*k) : Json(nullptr);
    j["twiddles"] = twiddles ? Json(*twiddles) : Json(nullptr);
    j["seed"] = seed ? Json(*seed) : Json(nullptr);
    j["contexts_checked"] = contexts_checked;
    if (witness) j["witness"] = witness_json(*witness);
    j["details"] = details;
    j["notes"] = notes;
    j["elapsed_ms"] = to_ms(elapsed);
    return j;
}

namespace {

int rank(Verdict v) {
    switch (v) {
        case Verdict::Pass: return 0;
        case Verdict::SampledPass: return 1;
        case Verdict::SecondOrderLeak: return 2;
        case Verdict::Inconclusive: return 3;
        case Verdict::Fail: return 4;
    }
    return 4;
}

}  // namespace

Verdict worse(Verdict x, Verdict y) { return rank(x) >= rank(y) ? x : y; }

void Tally::add(const CheckReport& r, const Json& context) {
    ++runs_;
    contexts_ += r.contexts_checked;
    elapsed_ += r.elapsed;
    if (r.mode == Mode::Sampled) {
        sampled_ = true;
        if (!seed_) seed_ = r.seed;
    }
    verdict_ = worse(verdict_, r.verdict);
    if (r.verdict == Verdict::Fail && !witness_ && r.witness) {
        witness_ = r.witness;
        context_ = context;
    }
    for (const auto& n : r.notes) {
        if (std::find(notes_.begin(), notes_.end(), n) == notes_.end()) notes_.push_back(n);
    }
}

Verdict Tally::verdict() const {
    if (verdict_ == Verdict::Pass && sampled_) return Verdict::SampledPass;
    return verdict_;
}

Json Tally::to_json() const {
    Json j;
    j["property"] = property_;
    j["verdict"] = to_string(verdict());
    j["mode"] = to_string(mode());
    if (witness_ && !context_.empty()) j["context"] = context_;
    j["seed"] = seed_ ? Json(*seed_) : Json(nullptr);
    j["runs"] = runs_;
    j["contexts_checked"] = contexts_;
    if (witness_) j["witness"] = witness_json(*witness_);
    j["notes"] = notes_;
    j["elapsed_ms"] = to_ms(elapsed_);
    return j;
}

void zero_elapsed(Json& j) {
    if (j.is_object()) {
        for (auto& [key, value] : j.items()) {
            if (key == "elapsed_ms") {
                value = 0.0;
            } else {
                zero_elapsed(value);
            }
        }
    } else if (j.is_array()) {
        for (auto& item : j) zero_elapsed(item);
    }
}

namespace {

std::string scalar(const Json& j) {
    if (j.is_null()) return "-";
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_float()) {
        std::ostringstream os;
        os << std::setprecision(12) << j.get<double>();
        return os.str();
    }
    return j.dump();
}

// Flat objects and arrays of scalars fit on one line.
bool is_flat(const Json& j) {
    if (j.is_object() || j.is_array()) {
        for (const auto& item : j) {
            if (item.is_object() || item.is_array()) return false;
        }
        return true;
    }
    return true;
}

std::string inline_form(const Json& j) {
    std::string out;
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            if (!out.empty()) out += ' ';
            out += key + "=" + scalar(value);
        }
    } else if (j.is_array()) {
        for (const auto& item : j) {
            if (!out.empty()) out += ", ";
            out += scalar(item);
        }
        out = "[" + out + "]";
    } else {
        out = scalar(j);
    }
    return out;
}

void render(const Json& j, const std::string& indent, std::ostringstream& os) {
    for (const auto& [key, value] : j.items()) {
        if (key == "notes" && value.is_array()) {
            for (const auto& n : value) os << indent << std::left << std::setw(18) << "note" << scalar(n) << '\n';
            continue;
        }
        if (is_flat(value)) {
            os << indent << std::left << std::setw(18) << key << inline_form(value) << '\n';
            continue;
        }
        os << indent << key << '\n';
        if (value.is_array()) {
            std::size_t index = 0;
            for (const auto& item : value) {
                if (item.is_object() && !is_flat(item)) {
                    os << indent << "  [" << index << "]\n";
                    render(item, indent + "    ", os);
                } else {
                    os << indent << "  [" << index << "] " << inline_form(item) << '\n';
                }
                ++index;
            }
        } else {
            render(value, indent + "  ", os);
        }
    }
}

}  // namespace

std::string render_text(const Json& report) {
    std::ostringstream os;
    render(report, "", os);
    return os.str();
}

}  // namespace maskcheck::cli
