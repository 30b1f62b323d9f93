#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "asd/corpus.hpp"
#include "asd/vocab.hpp"

namespace asd::test {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("asd_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline SymptomId sym(const std::string& name) {
  const auto& v = default_symptom_vocab();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] == name) return SymptomId(i);
  throw std::runtime_error("no symptom " + name);
}

inline DiseaseId dis(const std::string& name) {
  const auto& v = default_disease_vocab();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] == name) return DiseaseId(i);
  throw std::runtime_error("no disease " + name);
}

/// The Bronchiolitis goal used as the running example.
inline UserGoal bronchiolitis_goal() {
  UserGoal g;
  g.id = "bronchiolitis";
  g.disease = dis("Bronchiolitis");
  g.explicit_symptoms = {{sym("Runny Nose"), true}, {sym("Cough"), true}};
  g.implicit_symptoms = {{sym("Sore Throat"), true}, {sym("Emesis"), false}, {sym("Harsh Breath"), true},
                         {sym("Fever"), false}};
  auto by_id = [](const auto& a, const auto& b) { return a.symptom < b.symptom; };
  std::sort(g.explicit_symptoms.begin(), g.explicit_symptoms.end(), by_id);
  std::sort(g.implicit_symptoms.begin(), g.implicit_symptoms.end(), by_id);
  return g;
}

/// Runny-nose self report; cough, sneeze, headache and phlegm are implicit and
/// present, fever is not part of the goal.
inline UserGoal runny_nose_goal() {
  UserGoal g;
  g.id = "runny-nose";
  g.disease = dis("Bronchiolitis");
  g.explicit_symptoms = {{sym("Runny Nose"), true}};
  g.implicit_symptoms = {{sym("Cough"), true}, {sym("Sneeze"), true}, {sym("Headache"), true}, {sym("Phlegm"), true}};
  std::sort(g.implicit_symptoms.begin(), g.implicit_symptoms.end(),
            [](const auto& a, const auto& b) { return a.symptom < b.symptom; });
  return g;
}

inline Corpus single_goal_corpus(UserGoal g) {
  Corpus c;
  c.symptoms = default_symptom_vocab();
  c.diseases = default_disease_vocab();
  c.goals.push_back(std::move(g));
  return c;
}

}  // namespace asd::test
