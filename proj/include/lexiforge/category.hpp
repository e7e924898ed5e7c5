#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "lexiforge/error.hpp"

namespace lexiforge {

// The six concept categories of the gold lexicon, plus `mac` for macro-terms
// (unions of overlapping lexicon matches). `mac` is never a lexicon category.
enum class Category { sus, dig, mag, inn, bus, cor, mac };

inline constexpr std::array<Category, 6> kLexiconCategories = {
    Category::sus, Category::dig, Category::mag, Category::inn, Category::bus, Category::cor};

inline constexpr std::array<Category, 7> kAllCategories = {
    Category::sus, Category::dig, Category::mag, Category::inn,
    Category::bus, Category::cor, Category::mac};

inline std::string_view code(Category c) {
  switch (c) {
    case Category::sus: return "sus";
    case Category::dig: return "dig";
    case Category::mag: return "mag";
    case Category::inn: return "inn";
    case Category::bus: return "bus";
    case Category::cor: return "cor";
    case Category::mac: return "mac";
  }
  return "?";
}

// French category names as given by the lexicon authors.
inline std::string_view label(Category c) {
  switch (c) {
    case Category::sus: return "durabilité";
    case Category::dig: return "transformation numérique";
    case Category::mag: return "gestion du changement";
    case Category::inn: return "activités d'innovation";
    case Category::bus: return "modèles d'entreprise";
    case Category::cor: return "responsabilité sociale des entreprises";
    case Category::mac: return "macro-terme";
  }
  return "?";
}

// Names written into `category='…'` attributes of the annotation format.
inline std::string_view annotation_label(Category c) {
  switch (c) {
    case Category::sus: return "Sustainability";
    case Category::dig: return "Digital transformation";
    case Category::mag: return "Change management";
    case Category::inn: return "Innovation activities";
    case Category::bus: return "Business models";
    case Category::cor: return "Corporate social responsibility";
    case Category::mac: return "macro-term";
  }
  return "?";
}

inline std::optional<Category> category_from_code(std::string_view s) {
  for (auto c : kAllCategories) {
    if (code(c) == s) return c;
  }
  return std::nullopt;
}

// Accepts an annotation label, a French label, or a code.
inline std::optional<Category> category_from_label(std::string_view s) {
  for (auto c : kAllCategories) {
    if (annotation_label(c) == s || label(c) == s || code(c) == s) return c;
  }
  return std::nullopt;
}

inline Category parse_lexicon_category(std::string_view s) {
  auto c = category_from_code(s);
  if (!c || *c == Category::mac) {
    throw Error(ErrorCode::bad_category, "unknown category code '" + std::string(s) + "'");
  }
  return *c;
}

}  // namespace lexiforge
