"""Confusion counts with their printed 4-decimal accuracy and F1 and
2-decimal AUC, as they appear in the reference result tables (level-0,
level-1 and combined). 44 distinct rows."""

# (test_run, classifier, tp, fp, fn, tn, accuracy, f1, auc)
ROWS = [
    ('0SMOTE', 'MLP', 142, 20, 43, 113718, 0.9994, 0.8184, 0.96),
    ('0ROS', 'MLP', 142, 28, 41, 113712, 0.9994, 0.8046, 0.96),
    ('0BLSMOTE', 'MLP', 150, 27, 46, 113700, 0.9994, 0.8043, 0.96),
    ('0BLSMOTE', 'GBM', 147, 28, 49, 113699, 0.9993, 0.7925, 0.96),
    ('0SMOTEENN', 'AdaBoost', 131, 28, 65, 113699, 0.9992, 0.7380, 0.96),
    ('0BLSMOTE', 'AdaBoost', 127, 28, 69, 113699, 0.9991, 0.7237, 0.96),
    ('0BLSMOTE', 'GaussianNB', 171, 671, 25, 113056, 0.9939, 0.3295, 0.96),
    ('0SMOTETomek', 'GaussianNB', 171, 694, 30, 113028, 0.9936, 0.3208, 0.96),
    ('0RUS', 'GaussianNB', 170, 731, 31, 112991, 0.9933, 0.3086, 0.96),
    ('0ROS', 'GaussianNB', 160, 697, 23, 113043, 0.9937, 0.3077, 0.96),
    ('0full', 'GaussianNB', 163, 706, 29, 113025, 0.9935, 0.3073, 0.96),
    ('0SMOTEENN', 'GaussianNB', 169, 735, 27, 112992, 0.9933, 0.3072, 0.96),
    ('0ADASYN', 'GaussianNB', 149, 668, 26, 113080, 0.9939, 0.3004, 0.96),
    ('0SMOTE', 'GaussianNB', 155, 695, 30, 113043, 0.9936, 0.2996, 0.96),
    ('0BLSMOTE', 'EasyEnsemble', 178, 4874, 18, 108853, 0.9571, 0.0678, 0.96),
    ('0SMOTEENN', 'EasyEnsemble', 177, 6876, 19, 106851, 0.9395, 0.0488, 0.96),
    ('0ADASYN', 'EasyEnsemble', 159, 7304, 16, 106444, 0.9357, 0.0416, 0.96),
    ('6metalearner', 'GBM', 96, 19, 46, 85281, 0.9992, 0.7471, 0.97),
    ('1metalearner', 'GaussianNB', 122, 523, 22, 84775, 0.9936, 0.3092, 0.97),
    ('7metalearner', 'EasyEnsemble', 133, 4918, 13, 80378, 0.9423, 0.0511, 0.97),
    ('5metalearner', 'GBM', 116, 17, 40, 85269, 0.9993, 0.8028, 0.96),
    ('7metalearner', 'MLP', 108, 16, 38, 85280, 0.9994, 0.8000, 0.96),
    ('1metalearner', 'MLP', 108, 18, 36, 85280, 0.9994, 0.8000, 0.96),
    ('7metalearner', 'GBM', 109, 19, 37, 85277, 0.9993, 0.7957, 0.96),
    ('5stackROS', 'MLP', 140, 27, 48, 113708, 0.9993, 0.7887, 0.96),
    ('8metalearner', 'MLP', 106, 21, 40, 85275, 0.9993, 0.7765, 0.96),
    ('1metalearner', 'GBM', 105, 22, 39, 85276, 0.9993, 0.7749, 0.96),
    ('2metalearner', 'MLP', 102, 19, 42, 85279, 0.9993, 0.7698, 0.96),
    ('8metalearner', 'AdaBoost', 93, 21, 53, 85275, 0.9991, 0.7154, 0.96),
    ('6metalearner', 'MLP', 90, 22, 52, 85278, 0.9991, 0.7087, 0.96),
    ('2metalearner', 'AdaBoost', 88, 24, 56, 85274, 0.9991, 0.6875, 0.96),
    ('2metalearner', 'GaussianNB', 127, 502, 17, 84796, 0.9939, 0.3286, 0.96),
    ('7metalearner', 'GaussianNB', 124, 485, 22, 84811, 0.9941, 0.3285, 0.96),
    ('5metalearner', 'GaussianNB', 134, 526, 22, 84760, 0.9936, 0.3284, 0.96),
    ('2stackSMOTE', 'GaussianNB', 179, 719, 30, 112995, 0.9934, 0.3234, 0.96),
    ('8metalearner', 'GaussianNB', 127, 521, 19, 84775, 0.9937, 0.3199, 0.96),
    ('6metalearner', 'GaussianNB', 120, 503, 22, 84797, 0.9939, 0.3137, 0.96),
    ('3metalearner', 'GaussianNB', 125, 547, 20, 84750, 0.9934, 0.3060, 0.96),
    ('7stackSMOTETomek', 'GaussianNB', 158, 727, 29, 113009, 0.9934, 0.2947, 0.96),
    ('3metalearner', 'RUSBoost', 124, 669, 21, 84628, 0.9919, 0.2644, 0.96),
    ('2metalearner', 'RUSBoost', 127, 1068, 17, 84230, 0.9873, 0.1897, 0.96),
    ('2metalearner', 'EasyEnsemble', 131, 4272, 13, 81026, 0.9498, 0.0577, 0.96),
    ('6metalearner', 'EasyEnsemble', 130, 5053, 12, 80247, 0.9407, 0.0489, 0.96),
    ('1metalearner', 'EasyEnsemble', 128, 5492, 16, 79806, 0.9355, 0.0445, 0.96),
]
