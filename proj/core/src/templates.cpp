#include "reportrl/templates.hpp"

#include <array>

namespace reportrl {

namespace {

struct TemplateRow {
    std::string positive;
    std::string negative;
    std::string uncertain;
};

const std::array<TemplateRow, kCategoryCount>& template_table() {
    static const std::array<TemplateRow, kCategoryCount> rows = {{
        // Atelectasis
        {"Atelectasis is present in the lung bases.",
         "No atelectasis is seen.",
         "Possible atelectasis in the lung bases."},
        // Cardiomegaly
        {"The heart is enlarged, consistent with cardiomegaly.",
         "No cardiomegaly is identified.",
         "Possible mild cardiomegaly."},
        // Consolidation
        {"There is consolidation in the right lower lobe.",
         "No consolidation is identified.",
         "Possible consolidation in the left lung."},
        // Edema
        {"Pulmonary edema is present.",
         "There is no pulmonary edema.",
         "Possible mild pulmonary edema."},
        // Enlarged Cardiomediastinum
        {"The cardiomediastinal silhouette is enlarged.",
         "No cardiomediastinal enlargement is seen.",
         "Possible enlargement of the cardiomediastinum."},
        // Fracture
        {"An acute rib fracture is identified.",
         "No acute fracture is seen.",
         "Possible rib fracture."},
        // Lung Lesion
        {"A pulmonary nodule is noted in the right upper lobe.",
         "No pulmonary nodule or mass is seen.",
         "Possible pulmonary nodule."},
        // Lung Opacity
        {"Opacity is observed in the right lower lobe.",
         "No focal opacity is seen.",
         "Possible patchy opacity in the left base."},
        // No Finding: only the positive slot renders; the labeler derives
        // this category, so negating or hedging it asserts nothing.
        {"No acute cardiopulmonary process.", "", ""},
        // Pleural Effusion
        {"There is a small right pleural effusion.",
         "There is no pleural effusion.",
         "Possible trace pleural effusion."},
        // Pleural Other
        {"Pleural thickening is noted.",
         "No pleural thickening is seen.",
         "Possible pleural thickening."},
        // Pneumonia
        {"Findings are consistent with pneumonia.",
         "No evidence of pneumonia.",
         "Possible pneumonia."},
        // Pneumothorax
        {"A small pneumothorax is present.",
         "There is no pneumothorax.",
         "Possible apical pneumothorax."},
        // Support Devices
        {"An endotracheal tube is in place.",
         "No support devices are present.",
         "Possible retained support device."},
    }};
    return rows;
}

}  // namespace

const std::string& template_sentence(Category c, MentionKind kind) {
    const TemplateRow& row = template_table()[static_cast<std::size_t>(c)];
    switch (kind) {
        case MentionKind::AssertPositive: return row.positive;
        case MentionKind::AssertNegative: return row.negative;
        case MentionKind::AssertUncertain: return row.uncertain;
    }
    return row.positive;
}

const std::string& empty_findings_sentence() {
    static const std::string sentence = "No acute cardiopulmonary process.";
    return sentence;
}

}  // namespace reportrl
