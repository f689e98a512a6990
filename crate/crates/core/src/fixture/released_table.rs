// Frozen per-problem maximum reranker scores for the released score asset.
// Generated once; do not edit by hand. Columns: (subject index, level,
// max score scaled by 1e4, whether the problem has four candidates above 0.7).

pub(crate) const RELEASED_MAX_SCORES: &[(u8, u8, u16, bool)] = &[
    (0, 1, 9640, true),
    (0, 1, 9672, true),
    (0, 1, 9477, true),
    (0, 1, 9095, false),
    (0, 1, 4658, false),
    (0, 1, 787, false),
    (0, 1, 659, false),
    (0, 1, 187, false),
    (0, 1, 613, false),
    (0, 1, 704, false),
    (0, 1, 235, false),
    (0, 1, 264, false),
    (0, 1, 348, false),
    (0, 1, 171, false),
    (0, 1, 248, false),
    (0, 1, 866, false),
    (0, 1, 325, false),
    (0, 2, 9567, true),
    (0, 2, 9577, true),
    (0, 2, 9461, true),
    (0, 2, 9428, true),
    (0, 2, 3809, false),
    (0, 2, 4049, false),
    (0, 2, 4851, false),
    (0, 2, 929, false),
    (0, 2, 799, false),
    (0, 2, 438, false),
    (0, 2, 617, false),
    (0, 2, 194, false),
    (0, 2, 487, false),
    (0, 2, 841, false),
    (0, 2, 443, false),
    (0, 2, 176, false),
    (0, 2, 232, false),
    (0, 2, 841, false),
    (0, 2, 223, false),
    (0, 2, 154, false),
    (0, 2, 881, false),
    (0, 3, 9313, true),
    (0, 3, 9319, true),
    (0, 3, 9264, false),
    (0, 3, 9124, false),
    (0, 3, 8610, false),
    (0, 3, 8480, false),
    (0, 3, 8787, false),
    (0, 3, 7934, false),
    (0, 3, 3219, false),
    (0, 3, 2817, false),
    (0, 3, 2147, false),
    (0, 3, 920, false),
    (0, 3, 462, false),
    (0, 3, 877, false),
    (0, 3, 486, false),
    (0, 3, 790, false),
    (0, 3, 573, false),
    (0, 3, 213, false),
    (0, 3, 848, false),
    (0, 3, 284, false),
    (0, 3, 393, false),
    (0, 3, 156, false),
    (0, 3, 859, false),
    (0, 3, 838, false),
    (0, 3, 901, false),
    (0, 3, 419, false),
    (0, 4, 7675, false),
    (0, 4, 7880, false),
    (0, 4, 6381, false),
    (0, 4, 6414, false),
    (0, 4, 5511, false),
    (0, 4, 5232, false),
    (0, 4, 5941, false),
    (0, 4, 2380, false),
    (0, 4, 2771, false),
    (0, 4, 2110, false),
    (0, 4, 2588, false),
    (0, 4, 2329, false),
    (0, 4, 474, false),
    (0, 4, 302, false),
    (0, 4, 627, false),
    (0, 4, 597, false),
    (0, 4, 170, false),
    (0, 4, 451, false),
    (0, 4, 696, false),
    (0, 4, 241, false),
    (0, 4, 855, false),
    (0, 4, 634, false),
    (0, 4, 159, false),
    (0, 4, 240, false),
    (0, 4, 798, false),
    (0, 4, 888, false),
    (0, 4, 736, false),
    (0, 4, 641, false),
    (0, 4, 159, false),
    (0, 4, 218, false),
    (0, 5, 5859, false),
    (0, 5, 5769, false),
    (0, 5, 5334, false),
    (0, 5, 5278, false),
    (0, 5, 6204, false),
    (0, 5, 2184, false),
    (0, 5, 2138, false),
    (0, 5, 2894, false),
    (0, 5, 2542, false),
    (0, 5, 1443, false),
    (0, 5, 1196, false),
    (0, 5, 1086, false),
    (0, 5, 1557, false),
    (0, 5, 1272, false),
    (0, 5, 1882, false),
    (0, 5, 1303, false),
    (0, 5, 1526, false),
    (0, 5, 1564, false),
    (0, 5, 1616, false),
    (0, 5, 1104, false),
    (0, 5, 1423, false),
    (0, 5, 1677, false),
    (0, 5, 1720, false),
    (0, 5, 1225, false),
    (0, 5, 1777, false),
    (0, 5, 1300, false),
    (0, 5, 1279, false),
    (0, 5, 1256, false),
    (0, 5, 1239, false),
    (0, 5, 1746, false),
    (1, 1, 9199, false),
    (1, 1, 222, false),
    (1, 2, 9060, false),
    (1, 2, 9344, true),
    (1, 2, 9316, true),
    (1, 2, 3925, false),
    (1, 2, 3088, false),
    (1, 2, 462, false),
    (1, 2, 463, false),
    (1, 3, 9310, true),
    (1, 3, 9292, true),
    (1, 3, 9165, false),
    (1, 3, 182, false),
    (1, 4, 9357, true),
    (1, 4, 3319, false),
    (1, 4, 3613, false),
    (1, 4, 469, false),
    (1, 4, 183, false),
    (1, 4, 365, false),
    (1, 4, 123, false),
    (1, 4, 391, false),
    (1, 4, 546, false),
    (1, 4, 462, false),
    (1, 4, 481, false),
    (1, 4, 306, false),
    (1, 4, 379, false),
    (1, 5, 9200, false),
    (1, 5, 9181, false),
    (1, 5, 3596, false),
    (1, 5, 2132, false),
    (1, 5, 398, false),
    (1, 5, 326, false),
    (1, 5, 350, false),
    (1, 5, 213, false),
    (1, 5, 164, false),
    (1, 5, 429, false),
    (1, 5, 530, false),
    (1, 5, 274, false),
    (2, 1, 455, false),
    (2, 1, 381, false),
    (2, 2, 3789, false),
    (2, 2, 372, false),
    (2, 2, 300, false),
    (2, 2, 368, false),
    (2, 2, 449, false),
    (2, 2, 440, false),
    (2, 2, 293, false),
    (2, 2, 146, false),
    (2, 3, 9257, false),
    (2, 3, 9240, false),
    (2, 3, 3166, false),
    (2, 3, 3338, false),
    (2, 3, 3163, false),
    (2, 3, 309, false),
    (2, 3, 388, false),
    (2, 3, 213, false),
    (2, 4, 9357, true),
    (2, 4, 9286, true),
    (2, 4, 3116, false),
    (2, 4, 2330, false),
    (2, 4, 381, false),
    (2, 4, 470, false),
    (2, 4, 177, false),
    (2, 4, 323, false),
    (2, 4, 395, false),
    (2, 4, 140, false),
    (2, 5, 9110, false),
    (2, 5, 9359, true),
    (2, 5, 2229, false),
    (2, 5, 2254, false),
    (2, 5, 383, false),
    (2, 5, 345, false),
    (2, 5, 320, false),
    (2, 5, 157, false),
    (2, 5, 245, false),
    (2, 5, 446, false),
    (2, 5, 168, false),
    (2, 5, 478, false),
    (2, 5, 322, false),
    (3, 1, 9243, false),
    (3, 1, 9448, true),
    (3, 1, 9442, true),
    (3, 1, 3531, false),
    (3, 1, 267, false),
    (3, 1, 408, false),
    (3, 1, 514, false),
    (3, 2, 9351, true),
    (3, 2, 9288, true),
    (3, 2, 3084, false),
    (3, 2, 3218, false),
    (3, 2, 300, false),
    (3, 2, 408, false),
    (3, 2, 326, false),
    (3, 2, 585, false),
    (3, 2, 191, false),
    (3, 2, 589, false),
    (3, 2, 321, false),
    (3, 2, 284, false),
    (3, 3, 9222, false),
    (3, 3, 9512, true),
    (3, 3, 9288, true),
    (3, 3, 9275, false),
    (3, 3, 9285, true),
    (3, 3, 9056, false),
    (3, 3, 3874, false),
    (3, 3, 172, false),
    (3, 3, 193, false),
    (3, 3, 517, false),
    (3, 3, 309, false),
    (3, 3, 357, false),
    (3, 3, 231, false),
    (3, 3, 487, false),
    (3, 3, 384, false),
    (3, 3, 376, false),
    (3, 3, 498, false),
    (3, 3, 367, false),
    (3, 3, 483, false),
    (3, 4, 9123, false),
    (3, 4, 8517, false),
    (3, 4, 8125, false),
    (3, 4, 8469, false),
    (3, 4, 3202, false),
    (3, 4, 379, false),
    (3, 4, 459, false),
    (3, 4, 345, false),
    (3, 4, 311, false),
    (3, 4, 359, false),
    (3, 4, 175, false),
    (3, 4, 600, false),
    (3, 4, 467, false),
    (3, 4, 377, false),
    (3, 4, 500, false),
    (3, 4, 326, false),
    (3, 4, 491, false),
    (3, 4, 480, false),
    (3, 4, 493, false),
    (3, 4, 430, false),
    (3, 4, 129, false),
    (3, 4, 327, false),
    (3, 4, 371, false),
    (3, 5, 7548, false),
    (3, 5, 7531, false),
    (3, 5, 7411, false),
    (3, 5, 5615, false),
    (3, 5, 5188, false),
    (3, 5, 2116, false),
    (3, 5, 2213, false),
    (3, 5, 2191, false),
    (3, 5, 2218, false),
    (3, 5, 248, false),
    (3, 5, 381, false),
    (3, 5, 497, false),
    (3, 5, 518, false),
    (3, 5, 444, false),
    (3, 5, 417, false),
    (3, 5, 327, false),
    (3, 5, 290, false),
    (3, 5, 136, false),
    (3, 5, 131, false),
    (3, 5, 301, false),
    (3, 5, 194, false),
    (3, 5, 274, false),
    (3, 5, 195, false),
    (3, 5, 345, false),
    (3, 5, 166, false),
    (3, 5, 539, false),
    (3, 5, 429, false),
    (3, 5, 1555, false),
    (3, 5, 1321, false),
    (3, 5, 1553, false),
    (3, 5, 1415, false),
    (3, 5, 1301, false),
    (3, 5, 1208, false),
    (3, 5, 1158, false),
    (3, 5, 1501, false),
    (3, 5, 1194, false),
    (4, 1, 9080, false),
    (4, 1, 9167, false),
    (4, 1, 9398, true),
    (4, 1, 246, false),
    (4, 1, 133, false),
    (4, 2, 9365, true),
    (4, 2, 178, false),
    (4, 2, 477, false),
    (4, 2, 129, false),
    (4, 2, 572, false),
    (4, 2, 568, false),
    (4, 2, 207, false),
    (4, 2, 604, false),
    (4, 2, 265, false),
    (4, 2, 428, false),
    (4, 3, 9450, true),
    (4, 3, 9360, true),
    (4, 3, 214, false),
    (4, 3, 190, false),
    (4, 3, 586, false),
    (4, 3, 257, false),
    (4, 3, 180, false),
    (4, 3, 472, false),
    (4, 3, 535, false),
    (4, 3, 162, false),
    (4, 3, 301, false),
    (4, 3, 470, false),
    (4, 3, 211, false),
    (4, 3, 322, false),
    (4, 3, 460, false),
    (4, 3, 262, false),
    (4, 4, 9524, true),
    (4, 4, 9065, false),
    (4, 4, 9236, false),
    (4, 4, 9173, false),
    (4, 4, 9211, false),
    (4, 4, 3951, false),
    (4, 4, 174, false),
    (4, 4, 217, false),
    (4, 4, 238, false),
    (4, 4, 374, false),
    (4, 4, 607, false),
    (4, 4, 382, false),
    (4, 4, 261, false),
    (4, 4, 472, false),
    (4, 4, 527, false),
    (4, 4, 365, false),
    (4, 4, 478, false),
    (4, 4, 365, false),
    (4, 4, 384, false),
    (4, 5, 9317, true),
    (4, 5, 8145, false),
    (4, 5, 8262, false),
    (4, 5, 8518, false),
    (4, 5, 7152, false),
    (4, 5, 7520, false),
    (4, 5, 4035, false),
    (4, 5, 409, false),
    (4, 5, 413, false),
    (4, 5, 144, false),
    (4, 5, 381, false),
    (4, 5, 543, false),
    (5, 1, 9256, false),
    (5, 1, 9519, true),
    (5, 1, 476, false),
    (5, 1, 512, false),
    (5, 1, 487, false),
    (5, 1, 726, false),
    (5, 1, 682, false),
    (5, 2, 9248, false),
    (5, 2, 9385, true),
    (5, 2, 9533, true),
    (5, 2, 9051, false),
    (5, 2, 9284, true),
    (5, 2, 3218, false),
    (5, 2, 4357, false),
    (5, 2, 824, false),
    (5, 2, 774, false),
    (5, 2, 617, false),
    (5, 2, 399, false),
    (5, 2, 489, false),
    (5, 2, 566, false),
    (5, 2, 257, false),
    (5, 2, 818, false),
    (5, 2, 533, false),
    (5, 2, 733, false),
    (5, 2, 217, false),
    (5, 2, 367, false),
    (5, 3, 9070, false),
    (5, 3, 9744, true),
    (5, 3, 9558, true),
    (5, 3, 9095, false),
    (5, 3, 9463, true),
    (5, 3, 3362, false),
    (5, 3, 540, false),
    (5, 3, 227, false),
    (5, 3, 662, false),
    (5, 3, 799, false),
    (5, 3, 751, false),
    (5, 3, 647, false),
    (5, 3, 331, false),
    (5, 3, 678, false),
    (5, 3, 457, false),
    (5, 3, 334, false),
    (5, 3, 388, false),
    (5, 4, 8097, false),
    (5, 4, 8552, false),
    (5, 4, 828, false),
    (5, 4, 173, false),
    (5, 4, 734, false),
    (5, 4, 174, false),
    (5, 4, 522, false),
    (5, 4, 202, false),
    (5, 4, 691, false),
    (5, 4, 539, false),
    (5, 4, 595, false),
    (5, 4, 501, false),
    (5, 4, 162, false),
    (5, 4, 146, false),
    (5, 4, 491, false),
    (5, 4, 414, false),
    (5, 4, 186, false),
    (5, 4, 801, false),
    (5, 4, 463, false),
    (5, 4, 342, false),
    (5, 5, 7054, false),
    (5, 5, 7321, false),
    (5, 5, 7187, false),
    (5, 5, 7153, false),
    (5, 5, 5125, false),
    (5, 5, 3952, false),
    (5, 5, 511, false),
    (5, 5, 233, false),
    (5, 5, 640, false),
    (5, 5, 558, false),
    (5, 5, 202, false),
    (5, 5, 317, false),
    (5, 5, 346, false),
    (5, 5, 435, false),
    (5, 5, 815, false),
    (5, 5, 127, false),
    (5, 5, 639, false),
    (5, 5, 802, false),
    (5, 5, 584, false),
    (6, 1, 9420, true),
    (6, 1, 285, false),
    (6, 1, 878, false),
    (6, 2, 9148, false),
    (6, 2, 9502, true),
    (6, 2, 9221, false),
    (6, 2, 9359, true),
    (6, 2, 9417, true),
    (6, 2, 9128, false),
    (6, 2, 9448, true),
    (6, 2, 317, false),
    (6, 2, 615, false),
    (6, 2, 327, false),
    (6, 2, 323, false),
    (6, 2, 458, false),
    (6, 2, 913, false),
    (6, 3, 9363, true),
    (6, 3, 9281, false),
    (6, 3, 9083, false),
    (6, 3, 8541, false),
    (6, 3, 8211, false),
    (6, 3, 4312, false),
    (6, 3, 732, false),
    (6, 3, 863, false),
    (6, 3, 911, false),
    (6, 3, 177, false),
    (6, 3, 171, false),
    (6, 3, 634, false),
    (6, 3, 484, false),
    (6, 3, 256, false),
    (6, 3, 562, false),
    (6, 4, 8376, false),
    (6, 4, 7369, false),
    (6, 4, 7487, false),
    (6, 4, 3920, false),
    (6, 4, 3753, false),
    (6, 4, 4887, false),
    (6, 4, 776, false),
    (6, 4, 284, false),
    (6, 4, 554, false),
    (6, 4, 700, false),
    (6, 4, 838, false),
    (6, 4, 514, false),
    (6, 4, 760, false),
    (6, 5, 7659, false),
    (6, 5, 7465, false),
    (6, 5, 5834, false),
    (6, 5, 5803, false),
    (6, 5, 5783, false),
    (6, 5, 2809, false),
    (6, 5, 358, false),
    (6, 5, 145, false),
    (6, 5, 129, false),
    (6, 5, 911, false),
    (6, 5, 721, false),
    (6, 5, 829, false),
];
