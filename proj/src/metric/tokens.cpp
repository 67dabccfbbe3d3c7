#include <cmath>
#include <map>
#include <unordered_map>

#include "sketchkit/errors.hpp"
#include "sketchkit/python/lexer.hpp"
#include "sketchkit/sketchbleu.hpp"

namespace sketchkit::metric {
namespace {

constexpr double kSmoothing = 1e-9;
constexpr double kKeywordWeight = 5.0;

}  // namespace

std::string_view token_class_name(TokenClass cls) {
  switch (cls) {
    case TokenClass::Keyword:
      return "keyword";
    case TokenClass::Identifier:
      return "identifier";
    case TokenClass::Literal:
      return "literal";
    case TokenClass::Operator:
      return "operator";
    case TokenClass::Other:
      return "other";
  }
  return "other";
}

TokenStream tokenize(std::string_view source) {
  using python::TokenKind;
  TokenStream out;
  for (const python::Token& t : python::tokenize_lenient(source)) {
    switch (t.kind) {
      case TokenKind::Name:
        out.push_back({std::string(t.text), python::is_keyword(t.text) ? TokenClass::Keyword : TokenClass::Identifier});
        break;
      case TokenKind::Number:
      case TokenKind::String:
        out.push_back({std::string(t.text), TokenClass::Literal});
        break;
      case TokenKind::Op:
        out.push_back({std::string(t.text), TokenClass::Operator});
        break;
      case TokenKind::Error:
        if (!t.text.empty()) out.push_back({std::string(t.text), TokenClass::Other});
        break;
      default:
        break;
    }
  }
  return out;
}

TokenStream repository_tokens(const Repository& repo) {
  TokenStream out;
  for (const RepoFile* f : repo.code_files()) {
    out.push_back({std::string(kFileSentinel), TokenClass::Other});
    TokenStream file = tokenize(f->content);
    out.insert(out.end(), std::make_move_iterator(file.begin()), std::make_move_iterator(file.end()));
  }
  return out;
}

double brevity_penalty_prime(double c, double r) {
  if (!(c > 0.0) || !(r > 0.0) || !std::isfinite(c) || !std::isfinite(r)) {
    throw DomainError("brevity penalty needs positive lengths");
  }
  if (2.0 * c > r) return 1.0;
  return 1.0 / (1.0 + (std::log(r) - std::log(2.0 * c)));
}

double bleu_prime_tokens(const TokenStream& ref, const TokenStream& cand, int max_n, bool weighted) {
  if (ref.empty() || cand.empty()) throw EmptyRepository("BLEU needs tokens on both sides");
  if (max_n < 1) throw DomainError("n-gram order must be >= 1");

  std::unordered_map<std::string, int> ids;
  std::vector<double> weight;  // per token id, applied to n-grams it starts
  auto encode = [&](const TokenStream& s) {
    std::vector<int> out;
    out.reserve(s.size());
    for (const MetricToken& t : s) {
      auto [it, fresh] = ids.emplace(t.text, static_cast<int>(ids.size()));
      if (fresh) weight.push_back(weighted && t.cls == TokenClass::Keyword ? kKeywordWeight : 1.0);
      out.push_back(it->second);
    }
    return out;
  };
  std::vector<int> r = encode(ref);
  std::vector<int> c = encode(cand);

  using Counts = std::map<std::vector<int>, long>;
  auto count = [](const std::vector<int>& seq, int n) {
    Counts grams;
    for (std::size_t i = 0; i + n <= seq.size(); ++i) ++grams[std::vector<int>(seq.begin() + i, seq.begin() + i + n)];
    return grams;
  };

  double log_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    Counts rc = count(r, n);
    Counts cc = count(c, n);
    double precision = 1.0;
    if (!rc.empty() || !cc.empty()) {
      double matched = 0.0;
      double total = 0.0;
      for (const auto& [gram, k] : cc) {
        double w = weight[gram.front()];
        auto it = rc.find(gram);
        long clip = it == rc.end() ? 0 : std::min(k, it->second);
        matched += w * static_cast<double>(clip);
        total += w * static_cast<double>(k);
      }
      precision = total > 0.0 ? matched / total : 0.0;
    }
    if (precision <= 0.0) precision = kSmoothing;
    log_sum += std::log(precision) / max_n;
  }
  return brevity_penalty_prime(static_cast<double>(c.size()), static_cast<double>(r.size())) * std::exp(log_sum);
}

double bleu_prime(const Repository& ref, const Repository& cand, int max_n) {
  if (ref.code_files().empty() || cand.code_files().empty()) {
    throw EmptyRepository("BLEU needs a code file on both sides");
  }
  return bleu_prime_tokens(repository_tokens(ref), repository_tokens(cand), max_n, false);
}

double weighted_bleu_prime(const Repository& ref, const Repository& cand, int max_n) {
  if (ref.code_files().empty() || cand.code_files().empty()) {
    throw EmptyRepository("BLEU needs a code file on both sides");
  }
  return bleu_prime_tokens(repository_tokens(ref), repository_tokens(cand), max_n, true);
}

}  // namespace sketchkit::metric
