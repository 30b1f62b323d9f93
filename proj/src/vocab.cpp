#include "asd/vocab.hpp"

namespace asd {

const std::vector<std::string>& default_symptom_vocab() {
  static const std::vector<std::string> names = {
      "Runny Nose",        "Cough",           "Sore Throat",      "Emesis",
      "Harsh Breath",      "Fever",           "Sneeze",           "Headache",
      "Phlegm",            "Diarrhea",        "Rash",             "Wheeze",
      "Nasal Congestion",  "Hoarseness",      "Loss of Appetite", "Abdominal Pain",
      "Constipation",      "Dehydration",     "Fatigue",          "Irritability",
      "Crying",            "Poor Sleep",      "Dyspnea",          "Chest Pain",
      "Ear Pain",          "Eye Discharge",   "Red Eyes",         "Itching",
      "Eczema",            "Hives",           "Skin Peeling",     "Dry Skin",
      "Pallor",            "Jaundice",        "Abdominal Distension", "Flatulence",
      "Blood in Stool",    "Mucus in Stool",  "Green Stool",      "Watery Stool",
      "Foul Stool",        "Milk Regurgitation", "Nausea",        "Hiccups",
      "Drooling",          "Sweating",        "Chills",           "Convulsion",
      "Drowsiness",        "Swollen Lymph Nodes", "Tonsil Swelling", "Mouth Ulcers",
      "Bad Breath",        "Teething",        "Weight Loss",      "Frequent Urination",
      "Dark Urine",        "Joint Pain",      "Muscle Ache",      "Dizziness",
      "Nosebleed",         "Snoring",         "Stridor",          "Cyanosis",
      "Lethargy",          "Bloody Sputum",
  };
  return names;
}

const std::vector<std::string>& default_disease_vocab() {
  static const std::vector<std::string> names = {
      "Bronchiolitis",          "Upper Respiratory Infection", "Infantile Diarrhea",
      "Pediatric Pneumonia",    "Bronchitis",                  "Asthma",
      "Pharyngitis",            "Tonsillitis",                 "Laryngitis",
      "Otitis Media",           "Conjunctivitis",              "Atopic Dermatitis",
      "Urticaria",              "Rotavirus Enteritis",         "Gastroenteritis",
      "Functional Constipation", "Indigestion",                "Hand Foot Mouth Disease",
      "Influenza",              "Allergic Rhinitis",           "Sinusitis",
      "Febrile Seizure",        "Iron Deficiency Anemia",      "Neonatal Jaundice",
      "Infant Colic",           "Gastroesophageal Reflux",     "Urinary Tract Infection",
      "Measles",
  };
  return names;
}

std::vector<std::string> symptom_names(std::size_t n) {
  if (n == default_symptom_vocab().size()) return default_symptom_vocab();
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("S" + std::to_string(i));
  return out;
}

std::vector<std::string> disease_names(std::size_t n) {
  if (n == default_disease_vocab().size()) return default_disease_vocab();
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("D" + std::to_string(i));
  return out;
}

}  // namespace asd
