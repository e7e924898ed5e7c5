#pragma once

#include <set>
#include <string>
#include <vector>

#include "lexiforge/error.hpp"

namespace lexiforge::ingest {

struct FilterRules {
  std::vector<std::string> seed_keywords = {"innovation", "recherche", "development", "strategy", "design"};
  std::vector<std::string> url_excludes;
  std::set<std::string> allowed_tags = {"p", "title", "h1", "h2"};
  bool homepage_only = true;
  std::size_t max_depth = 1;

  void validate() const {
    if (seed_keywords.empty()) throw Error(ErrorCode::config, "seed_keywords must not be empty");
    if (allowed_tags.empty()) throw Error(ErrorCode::config, "allowed_tags must not be empty");
  }
};

// Sector labels of the company list the manifest stands in for.
inline const std::vector<std::string>& sector_labels() {
  static const std::vector<std::string> s = {
      "Machinerie électrique, électronique industrielle",
      "Chimie, pétrole, caoutchouc et plastique",
      "Services aux entreprises",
      "Fabrication de matériel de transport",
      "Communications",
      "Métaux et produits métalliques",
      "Logiciels informatiques",
      "Commerce de gros",
      "Fabrication de produits alimentaires, tabac",
      "Banque, assurances et services financiers",
      "Biotechnologie et sciences de la vie",
      "Matériel informatique",
      "Exploitation minière et extraction",
      "Services d'utilité publique",
      "Produits en cuir, pierre, argile et verre",
      "Fabrication de meubles",
      "Construction",
      "Médias et diffusion",
      "Fabrication de textiles et de vêtements",
      "Commerce de détail",
      "Transport, fret et stockage",
      "Fabrication diverse",
      "Voyages, personnel et loisirs",
      "Administration publique",
      "Imprimerie et édition",
      "Agriculture, horticulture et élevage",
      "Services immobiliers",
  };
  return s;
}

}  // namespace lexiforge::ingest
