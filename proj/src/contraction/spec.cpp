#include <cctype>
#include <limits>
#include <map>
#include <stdexcept>

#include "curvinv/contraction/contraction.hpp"
#include "curvinv/errors.hpp"

namespace curvinv::contraction {

namespace {

struct RawSlot {
  Variance variance;
  std::string label;
  bool free;
};

class SpecParser {
 public:
  explicit SpecParser(std::string_view text) : s_(text) {}

  std::vector<std::vector<RawSlot>> parse(std::vector<std::size_t>& base_slots) {
    std::vector<std::vector<RawSlot>> factors;
    skip();
    while (pos_ < s_.size()) {
      const std::string base = identifier();
      if (base != "R") fail("unknown base tensor '" + base + "'");
      expect('(');
      std::vector<RawSlot> slots;
      slots.push_back(slot());
      while (eat(',')) slots.push_back(slot());
      base_slots.push_back(slots.size());
      if (eat(';')) {
        slots.push_back(slot());
        while (eat(',')) slots.push_back(slot());
      }
      expect(')');
      factors.push_back(std::move(slots));
      skip();
    }
    if (factors.empty()) fail("empty invariant");
    return factors;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at offset " + std::to_string(pos_) + " in '" + std::string(s_) +
                     "'");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
  std::string identifier() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) fail("expected identifier");
    return std::string(s_.substr(start, pos_ - start));
  }
  RawSlot slot() {
    RawSlot out{};
    out.free = eat('*');
    if (eat('+')) {
      out.variance = Variance::upper;
    } else if (eat('-')) {
      out.variance = Variance::lower;
    } else {
      fail("expected '+' or '-'");
    }
    if (eat('*')) {
      if (out.free) fail("duplicate free marker");
      out.free = true;
    }
    out.label = identifier();
    return out;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::size_t> InvariantSpec::free_labels() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < free.size(); ++i) {
    if (free[i]) out.push_back(i);
  }
  return out;
}

std::string InvariantSpec::to_string() const {
  std::string out;
  for (const auto& f : factors) {
    if (!out.empty()) out += ' ';
    out += "R(";
    for (std::size_t s = 0; s < f.rank(); ++s) {
      if (s == 4) {
        out += ';';
      } else if (s > 0) {
        out += ',';
      }
      out += f.variance[s] == Variance::upper ? '+' : '-';
      if (free[f.labels[s]]) out += '*';
      out += label_names[f.labels[s]];
    }
    out += ')';
  }
  return out;
}

InvariantSpec parse_spec(std::string_view text) {
  std::vector<std::size_t> base_slots;
  const auto raw = SpecParser(text).parse(base_slots);
  InvariantSpec spec;
  std::map<std::string, std::size_t> ids;
  struct Use {
    std::size_t count = 0;
    std::size_t upper = 0;
    bool marked_free = false;
  };
  std::vector<Use> uses;
  for (std::size_t fi = 0; fi < raw.size(); ++fi) {
    if (base_slots[fi] != 4) {
      throw ParseError("factor " + std::to_string(fi + 1) + " has " +
                       std::to_string(base_slots[fi]) + " tensor slots; R takes 4");
    }
    const std::size_t derivs = raw[fi].size() - 4;
    if (derivs > 2) {
      throw ParseError("at most two covariant derivative slots are supported");
    }
    FactorSpec f;
    f.derivative_order = static_cast<unsigned>(derivs);
    f.antisym_pairs = {{0, 1}, {2, 3}};
    for (const auto& s : raw[fi]) {
      auto [it, inserted] = ids.try_emplace(s.label, spec.label_names.size());
      if (inserted) {
        spec.label_names.push_back(s.label);
        uses.emplace_back();
      }
      Use& u = uses[it->second];
      ++u.count;
      u.upper += s.variance == Variance::upper;
      u.marked_free |= s.free;
      f.variance.push_back(s.variance);
      f.labels.push_back(it->second);
    }
    spec.factors.push_back(std::move(f));
  }
  for (std::size_t id = 0; id < uses.size(); ++id) {
    const Use& u = uses[id];
    const std::string& name = spec.label_names[id];
    if (u.marked_free) {
      if (u.count != 1) throw ParseError("free label '" + name + "' must appear exactly once");
    } else if (u.count != 2) {
      throw ParseError("label '" + name + "' appears " + std::to_string(u.count) +
                       " times; contracted labels appear twice");
    } else if (u.upper != 1) {
      throw ParseError("label '" + name + "' must be contracted between an upper and a lower slot");
    }
    spec.free.push_back(u.marked_free);
  }
  return spec;
}

std::string preset_spec(std::string_view name) {
  if (name == "I_a" || name == "kretschmann") return "R(+a,+b,+c,+d) R(-a,-b,-c,-d)";
  if (name == "I_b") return "R(+a,+b,+c,+d) R(+e,+f,-a,-b) R(-c,-d,-e,-f)";
  if (name == "I_c") return "R(+a,+b,+c,+d;+e) R(-a,-b,-c,-d;-e)";
  if (name == "I_1") {
    return "R(+a,+b,+c,+d;+e,+f) R(-a,-g,-c,-h;-e,-f) R(+i,+g,+j,+h;+k,+l) "
           "R(-i,-b,-j,-d;-k,-l)";
  }
  if (name == "I_2") return "R(+a,+b,+c,+d) R(-a,-e,-f,-g) R(+e,+f,-b,-h) R(+g,+h,-c,-d)";
  throw std::invalid_argument("unknown invariant preset: " + std::string(name));
}

std::vector<std::string> preset_names() {
  return {"I_a", "I_b", "I_c", "I_1", "I_2", "kretschmann"};
}

Abbreviation detect_abbreviable_pairs(const InvariantSpec& spec) {
  Abbreviation out;
  const auto& fs = spec.factors;
  auto antisym = [](const FactorSpec& f, std::size_t slot) {
    for (const auto& [p, q] : f.antisym_pairs) {
      if (p == slot && f.variance[p] == f.variance[q]) return true;
    }
    return false;
  };
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (std::size_t j = i + 1; j < fs.size(); ++j) {
      for (std::size_t I = 0; I + 1 < fs[i].rank(); ++I) {
        for (std::size_t J = 0; J + 1 < fs[j].rank(); ++J) {
          const std::size_t l1 = fs[i].labels[I];
          const std::size_t l2 = fs[i].labels[I + 1];
          if (l1 != fs[j].labels[J] || l2 != fs[j].labels[J + 1]) continue;
          if (!antisym(fs[i], I) || !antisym(fs[j], J)) continue;
          if (spec.free[l1] || spec.free[l2]) continue;
          out.pairs.emplace_back(l1, l2);
          out.multiplier *= 2;
        }
      }
    }
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> detect_symmetric_derivative_pairs(
    const InvariantSpec& spec) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const auto& fs = spec.factors;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    if (fs[i].derivative_order != 2) continue;
    for (std::size_t j = i + 1; j < fs.size(); ++j) {
      if (fs[j].derivative_order != 2) continue;
      const std::size_t l1 = fs[i].labels[4];
      const std::size_t l2 = fs[i].labels[5];
      if (l1 == fs[j].labels[4] && l2 == fs[j].labels[5] && !spec.free[l1] && !spec.free[l2]) {
        out.emplace_back(l1, l2);
      }
    }
  }
  return out;
}

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (b != 0 && a > std::numeric_limits<std::uint64_t>::max() / b) {
    throw std::overflow_error("product count exceeds 64 bits");
  }
  return a * b;
}

}  // namespace

std::uint64_t worst_case_product_count(const InvariantSpec& spec, std::size_t dim) {
  const std::uint64_t D = dim;
  std::vector<bool> grouped(spec.label_count(), false);
  std::uint64_t total = 1;
  for (const auto& [a, b] : detect_abbreviable_pairs(spec).pairs) {
    total = checked_mul(total, D * (D - 1) / 2);
    grouped[a] = grouped[b] = true;
  }
  for (const auto& [a, b] : detect_symmetric_derivative_pairs(spec)) {
    if (grouped[a] || grouped[b]) continue;
    total = checked_mul(total, D * (D + 1) / 2);
    grouped[a] = grouped[b] = true;
  }
  for (std::size_t l = 0; l < spec.label_count(); ++l) {
    if (!grouped[l]) total = checked_mul(total, D);
  }
  return total;
}

double pair_exchange_factor(std::size_t dim) {
  const double d = static_cast<double>(dim);
  return 2 * d * (d - 1) / (d * (d - 1) + 2);
}

std::uint64_t independent_component_count(std::size_t dim) {
  if (dim < 2) throw std::invalid_argument("dimension must be at least 2");
  const std::uint64_t d2 = static_cast<std::uint64_t>(dim) * dim;
  return d2 * (d2 - 1) / 12;
}

}  // namespace curvinv::contraction
