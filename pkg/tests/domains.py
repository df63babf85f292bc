"""Attribute domains as listed in the census dataset description."""

GENDER = ["female", "male"]

COUNTY = [
    "Carlow", "Dublin City", "Dún Laoghaire-Rathdown", "Fingal", "South Dublin", "Kildare",
    "Kilkenny", "Laois", "Longford", "Louth", "Meath", "Offaly", "Westmeath", "Wexford",
    "Wicklow", "Clare", "Cork City", "Cork County", "Kerry", "Limerick City", "Limerick County",
    "North Tipperary", "South Tipperary", "Waterford City", "Waterford County", "Galway City",
    "Galway County", "Leitrim", "Mayo", "Roscommon", "Sligo", "Cavan", "Donegal", "Monaghan",
]

MARITAL_STATUS = [
    "Single", "Married (first marriage)", "Re-married (following widowhood)",
    "Re-married (following dissolution of previous marriage)", "Separated (including deserted)",
    "Divorced", "Widowed",
]

NATIVE_COUNTRY = [
    "Ireland", "Austria", "Belgium", "Bulgaria", "Cyprus", "Czech Republic", "Denmark", "Estonia",
    "Finland", "France", "Germany", "Greece", "Hungary", "Italy", "Latvia", "Lithuania",
    "Luxembourg", "Malta", "Netherlands", "Poland", "Portugal", "Romania", "Slovakia", "Slovenia",
    "Spain", "Sweden", "Russian Federation", "Ukraine", "Niger", "South Africa", "Mauritius",
    "India", "Philippines", "China", "Pakistan", "Malaysia", "United States of America", "Brazil",
    "Canada", "Australia", "New Zealand",
]

ECONOMIC_STATUS = [
    "Employer or own account worker", "Employee", "Assisting relative",
    "Unemployed looking for first regular job", "Unemployed having lost or given up previous job",
    "Student or pupil", "Looking after home/family", "Retired",
    "Unable to work due to permanent sickness or disability", "Other economic status",
]

INDUSTRIAL_GROUP = [
    "Agriculture, forestry and fishing (A)", "Mining and quarrying (B)", "Manufacturing (C)",
    "Electricity, gas, steam and air conditioning supply (D)",
    "Water supply; sewerage, waste management and remediation activities (E)",
    "Construction (F)",
    "Wholesale and retail trade; repair of motor vehicles and motorcycles (G)",
    "Transportation and storage (H)", "Accommodation and food service activities (I)",
    "Information and communication (J)", "Financial and insurance activities (K)",
    "Real estate activities (L)", "Professional, scientific and technical activities (M)",
    "Administrative and support service activities (N)",
    "Public administration and defence; compulsory social security (O)", "Education (P)",
    "Human health and social work activities (Q)", "Arts, entertainment and recreation (R)",
    "Other service activities (S)",
    "Activities of households as employers producing activities of households for own use (T)",
    "Activities of extraterritorial organisations and bodies (U)",
]

EDUCATION = [
    "No formal education", "Primary", "Lower secondary", "Upper secondary",
    "Technical/vocational", "Advanced certificate/completed apprenticeship", "Higher certificate",
    "Ordinary bachelor degree/professional qualification or both",
    "Honours bachelor degree/professional qualification or both",
    "Postgraduate diploma or degree", "Doctorate (Ph.D)",
]

FIELD_OF_STUDY = [
    "Education and teacher training", "Music and performing arts",
    "Audio-visual techniques and media production", "Design", "Other arts", "Foreign languages",
    "Mother tongue", "History and archaeology", "Other humanities", "Psychology", "Economics",
    "Business and administration (broad programmes)", "Marketing and advertising",
    "Accounting and taxation", "Management and administration", "Secretarial and office work",
    "Law", "Other social sciences, business and law subjects", "Biology and biochemistry",
    "Physical sciences (physics, chemistry, earth science)", "Computer science", "Computer use",
    "Other science, mathematics and computing",
    "Engineering and engineering trades (broad programmes)", "Mechanics and metalwork",
    "Electricity and energy", "Motor vehicles, ships and aircraft",
    "Architecture and town planning", "Building and civil engineering",
    "Other engineering, manufacturing and construction", "Crop and livestock production",
    "Other agriculture and veterinary", "Medicine", "Nursing and caring",
    "Child care and youth services", "Social work and counselling", "Other health and welfare",
    "Hotel, restaurant and catering", "Hair and beauty services", "Other personal services",
    "Air transportation", "Ground transportation", "Sea transportation",
    "Other transportation services", "Public security services", "Industrial security services",
    "Other security services", "Other subjects",
]

# output column -> allowed values
BY_COLUMN = {
    "Gender": GENDER,
    "County": COUNTY,
    "MaritalStatus": MARITAL_STATUS,
    "NativeCountry": NATIVE_COUNTRY,
    "EconomicStatus": ECONOMIC_STATUS,
    "IndustrialGroup": INDUSTRIAL_GROUP,
    "Education": EDUCATION,
    "FieldOfStudy": FIELD_OF_STUDY,
}
