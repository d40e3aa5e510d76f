//! 32×32 grayscale ramp and its libjpeg (quality 20/50, no
//! subsampling) decodes, for cross-checking the block codec model.

pub const SRC: [u8; 1024] = [
    140, 145, 151, 156, 161, 166, 170, 173, 176, 178, 179, 179, 179, 178, 176, 173,
    170, 166, 161, 156, 151, 145, 139, 134, 128, 123, 118, 113, 109, 106, 103, 101,
    139, 145, 150, 156, 161, 165, 169, 173, 175, 177, 178, 179, 178, 177, 175, 173,
    169, 165, 160, 155, 150, 145, 139, 133, 128, 122, 117, 113, 109, 105, 102, 101,
    137, 143, 148, 154, 159, 163, 167, 171, 174, 176, 177, 177, 177, 176, 174, 171,
    167, 163, 159, 154, 148, 143, 137, 131, 126, 120, 115, 111, 107, 103, 101, 99,
    134, 140, 146, 151, 156, 160, 164, 168, 171, 173, 174, 174, 174, 173, 171, 168,
    164, 160, 156, 151, 145, 140, 134, 129, 123, 118, 113, 108, 104, 101, 98, 96,
    130, 136, 142, 147, 152, 157, 161, 164, 167, 169, 170, 170, 170, 169, 167, 164,
    161, 157, 152, 147, 142, 136, 130, 125, 119, 114, 109, 104, 100, 97, 94, 92,
    126, 131, 137, 142, 147, 152, 156, 159, 162, 164, 165, 166, 165, 164, 162, 159,
    156, 152, 147, 142, 137, 131, 126, 120, 114, 109, 104, 99, 95, 92, 89, 87,
    120, 126, 132, 137, 142, 147, 151, 154, 157, 159, 160, 160, 160, 159, 157, 154,
    151, 147, 142, 137, 132, 126, 120, 115, 109, 104, 99, 94, 90, 87, 84, 82,
    115, 120, 126, 131, 136, 141, 145, 148, 151, 153, 154, 155, 154, 153, 151, 148,
    145, 141, 136, 131, 126, 120, 115, 109, 103, 98, 93, 88, 84, 81, 78, 76,
    109, 114, 120, 125, 130, 135, 139, 142, 145, 147, 148, 149, 148, 147, 145, 142,
    139, 135, 130, 125, 120, 114, 109, 103, 97, 92, 87, 82, 78, 75, 72, 70,
    103, 108, 114, 119, 124, 129, 133, 136, 139, 141, 142, 143, 142, 141, 139, 136,
    133, 129, 124, 119, 114, 108, 103, 97, 91, 86, 81, 76, 72, 69, 66, 64,
    97, 103, 108, 114, 119, 123, 127, 131, 133, 135, 137, 137, 137, 135, 133, 131,
    127, 123, 119, 114, 108, 103, 97, 91, 86, 80, 75, 71, 67, 63, 61, 59,
    92, 98, 103, 108, 113, 118, 122, 126, 128, 130, 131, 132, 131, 130, 128, 125,
    122, 118, 113, 108, 103, 97, 92, 86, 81, 75, 70, 66, 62, 58, 55, 53,
    87, 93, 99, 104, 109, 114, 118, 121, 124, 126, 127, 127, 127, 126, 124, 121,
    118, 114, 109, 104, 99, 93, 87, 82, 76, 71, 66, 61, 57, 54, 51, 49,
    84, 89, 95, 100, 105, 110, 114, 117, 120, 122, 123, 124, 123, 122, 120, 117,
    114, 110, 105, 100, 95, 89, 84, 78, 72, 67, 62, 58, 54, 50, 47, 45,
    81, 87, 93, 98, 103, 107, 111, 115, 118, 120, 121, 121, 121, 120, 118, 115,
    111, 107, 103, 98, 92, 87, 81, 75, 70, 65, 60, 55, 51, 48, 45, 43,
    80, 85, 91, 96, 101, 106, 110, 113, 116, 118, 119, 120, 119, 118, 116, 113,
    110, 106, 101, 96, 91, 85, 80, 74, 68, 63, 58, 54, 50, 46, 43, 41,
    80, 85, 91, 96, 101, 106, 110, 113, 116, 118, 119, 120, 119, 118, 116, 113,
    110, 106, 101, 96, 91, 85, 80, 74, 68, 63, 58, 53, 49, 46, 43, 41,
    80, 86, 92, 97, 102, 107, 111, 114, 117, 119, 120, 120, 120, 119, 117, 114,
    111, 107, 102, 97, 92, 86, 80, 75, 69, 64, 59, 54, 50, 47, 44, 42,
    83, 88, 94, 99, 104, 109, 113, 116, 119, 121, 122, 123, 122, 121, 119, 116,
    113, 109, 104, 99, 94, 88, 83, 77, 71, 66, 61, 56, 52, 49, 46, 44,
    86, 91, 97, 102, 107, 112, 116, 119, 122, 124, 125, 126, 125, 124, 122, 119,
    116, 112, 107, 102, 97, 91, 86, 80, 74, 69, 64, 60, 55, 52, 49, 47,
    90, 96, 101, 107, 112, 116, 120, 124, 126, 128, 129, 130, 129, 128, 126, 124,
    120, 116, 111, 106, 101, 96, 90, 84, 79, 73, 68, 64, 60, 56, 53, 51,
    95, 100, 106, 111, 116, 121, 125, 128, 131, 133, 134, 135, 134, 133, 131, 128,
    125, 121, 116, 111, 106, 100, 95, 89, 83, 78, 73, 69, 65, 61, 58, 56,
    100, 106, 112, 117, 122, 126, 131, 134, 137, 139, 140, 140, 140, 139, 137, 134,
    130, 126, 122, 117, 112, 106, 100, 95, 89, 84, 79, 74, 70, 67, 64, 62,
    106, 112, 117, 123, 128, 132, 136, 140, 143, 145, 146, 146, 146, 145, 143, 140,
    136, 132, 128, 123, 117, 112, 106, 100, 95, 89, 84, 80, 76, 72, 70, 68,
    112, 118, 123, 129, 134, 138, 142, 146, 149, 151, 152, 152, 152, 150, 148, 146,
    142, 138, 134, 129, 123, 118, 112, 106, 101, 95, 90, 86, 82, 78, 76, 74,
    118, 124, 129, 135, 140, 144, 148, 152, 154, 156, 158, 158, 158, 156, 154, 152,
    148, 144, 140, 135, 129, 124, 118, 112, 107, 101, 96, 92, 88, 84, 82, 80,
    124, 129, 135, 140, 145, 150, 154, 157, 160, 162, 163, 164, 163, 162, 160, 157,
    154, 150, 145, 140, 135, 129, 124, 118, 112, 107, 102, 97, 93, 90, 87, 85,
    129, 134, 140, 145, 150, 155, 159, 162, 165, 167, 168, 169, 168, 167, 165, 162,
    159, 155, 150, 145, 140, 134, 128, 123, 117, 112, 107, 102, 98, 95, 92, 90,
    133, 138, 144, 149, 154, 159, 163, 166, 169, 171, 172, 173, 172, 171, 169, 166,
    163, 159, 154, 149, 144, 138, 133, 127, 121, 116, 111, 107, 102, 99, 96, 94,
    136, 142, 147, 153, 158, 162, 166, 170, 172, 174, 176, 176, 176, 174, 172, 170,
    166, 162, 158, 153, 147, 142, 136, 130, 125, 119, 114, 110, 106, 102, 100, 98,
    138, 144, 150, 155, 160, 165, 169, 172, 175, 177, 178, 178, 178, 177, 175, 172,
    169, 164, 160, 155, 150, 144, 138, 133, 127, 122, 117, 112, 108, 105, 102, 100,
    139, 145, 151, 156, 161, 166, 170, 173, 176, 178, 179, 179, 179, 178, 176, 173,
    170, 166, 161, 156, 151, 145, 139, 134, 128, 123, 118, 113, 109, 106, 103, 101,
];

pub const LIBJPEG_Q20: [u8; 1024] = [
    144, 146, 150, 156, 161, 167, 171, 173, 174, 177, 180, 182, 182, 180, 177, 174,
    168, 166, 162, 156, 151, 145, 141, 139, 128, 126, 122, 116, 111, 105, 101, 99,
    142, 144, 149, 154, 160, 165, 169, 171, 173, 175, 179, 181, 181, 179, 175, 173,
    166, 164, 160, 155, 149, 144, 139, 137, 126, 124, 120, 115, 109, 104, 99, 97,
    139, 142, 146, 151, 157, 162, 166, 168, 170, 172, 176, 178, 178, 176, 172, 170,
    163, 161, 157, 152, 146, 141, 137, 134, 123, 121, 117, 112, 106, 101, 97, 94,
    135, 138, 142, 147, 153, 158, 162, 165, 166, 168, 172, 174, 174, 172, 168, 166,
    160, 157, 153, 148, 142, 137, 133, 130, 120, 117, 113, 108, 102, 97, 93, 90,
    131, 134, 138, 143, 149, 154, 158, 161, 162, 164, 168, 170, 170, 168, 164, 162,
    156, 153, 149, 144, 138, 133, 129, 126, 116, 113, 109, 104, 98, 93, 89, 86,
    128, 130, 134, 139, 145, 150, 154, 157, 158, 160, 164, 166, 166, 164, 160, 158,
    152, 149, 145, 140, 134, 129, 125, 123, 112, 109, 105, 100, 94, 89, 85, 83,
    125, 127, 131, 136, 142, 147, 152, 154, 155, 157, 161, 163, 163, 161, 157, 155,
    149, 147, 142, 137, 131, 126, 122, 120, 109, 107, 102, 97, 91, 86, 82, 80,
    123, 125, 129, 135, 140, 146, 150, 152, 154, 156, 159, 162, 162, 159, 156, 154,
    147, 145, 141, 135, 130, 124, 120, 118, 107, 105, 101, 95, 90, 84, 80, 78,
    109, 111, 115, 121, 126, 132, 136, 138, 140, 142, 145, 148, 148, 145, 142, 140,
    133, 131, 127, 121, 116, 110, 106, 104, 93, 91, 87, 81, 76, 70, 66, 64,
    107, 109, 113, 118, 124, 129, 134, 136, 137, 140, 143, 145, 145, 143, 140, 137,
    131, 129, 124, 119, 113, 108, 104, 102, 91, 89, 84, 79, 73, 68, 64, 62,
    102, 104, 109, 114, 120, 125, 129, 131, 133, 135, 139, 141, 141, 139, 135, 133,
    126, 124, 120, 115, 109, 104, 99, 97, 86, 84, 80, 75, 69, 64, 59, 57,
    97, 99, 103, 108, 114, 119, 123, 126, 127, 129, 133, 135, 135, 133, 129, 127,
    121, 118, 114, 109, 103, 98, 94, 92, 81, 78, 74, 69, 63, 58, 54, 52,
    90, 93, 97, 102, 108, 113, 117, 119, 121, 123, 127, 129, 129, 127, 123, 121,
    114, 112, 108, 103, 97, 92, 88, 85, 74, 72, 68, 63, 57, 52, 48, 45,
    85, 87, 91, 96, 102, 107, 112, 114, 115, 117, 121, 123, 123, 121, 117, 115,
    109, 107, 102, 97, 91, 86, 82, 80, 69, 67, 62, 57, 51, 46, 42, 40,
    80, 82, 87, 92, 98, 103, 107, 109, 111, 113, 116, 119, 119, 116, 113, 111,
    104, 102, 98, 93, 87, 82, 77, 75, 64, 62, 58, 53, 47, 42, 37, 35,
    78, 80, 84, 90, 95, 101, 105, 107, 108, 111, 114, 116, 116, 114, 111, 108,
    102, 100, 96, 90, 85, 79, 75, 73, 62, 60, 56, 50, 45, 39, 35, 33,
    83, 85, 89, 95, 100, 106, 110, 112, 114, 116, 119, 122, 122, 119, 116, 114,
    107, 105, 101, 95, 90, 84, 80, 78, 67, 65, 61, 55, 50, 44, 40, 38,
    85, 87, 91, 96, 102, 107, 112, 114, 115, 117, 121, 123, 123, 121, 117, 115,
    109, 107, 102, 97, 91, 86, 82, 80, 69, 67, 62, 57, 51, 46, 42, 40,
    88, 90, 94, 99, 105, 110, 114, 117, 118, 120, 124, 126, 126, 124, 120, 118,
    112, 109, 105, 100, 94, 89, 85, 83, 72, 69, 65, 60, 54, 49, 45, 43,
    91, 94, 98, 103, 109, 114, 118, 121, 122, 124, 128, 130, 130, 128, 124, 122,
    116, 113, 109, 104, 98, 93, 89, 86, 76, 73, 69, 64, 58, 53, 49, 46,
    95, 98, 102, 107, 113, 118, 122, 125, 126, 128, 132, 134, 134, 132, 128, 126,
    120, 117, 113, 108, 102, 97, 93, 90, 80, 77, 73, 68, 62, 57, 53, 50,
    99, 102, 106, 111, 117, 122, 126, 128, 130, 132, 136, 138, 138, 136, 132, 130,
    123, 121, 117, 112, 106, 101, 97, 94, 83, 81, 77, 72, 66, 61, 57, 54,
    102, 104, 109, 114, 120, 125, 129, 131, 133, 135, 139, 141, 141, 139, 135, 133,
    126, 124, 120, 115, 109, 104, 99, 97, 86, 84, 80, 75, 69, 64, 59, 57,
    104, 106, 110, 116, 121, 127, 131, 133, 134, 137, 140, 142, 142, 140, 137, 134,
    128, 126, 122, 116, 111, 105, 101, 99, 88, 86, 82, 76, 71, 65, 61, 59,
    123, 125, 129, 135, 140, 146, 150, 152, 154, 156, 159, 162, 162, 159, 156, 154,
    147, 145, 141, 135, 130, 124, 120, 118, 107, 105, 101, 95, 90, 84, 80, 78,
    125, 127, 131, 136, 142, 147, 152, 154, 155, 157, 161, 163, 163, 161, 157, 155,
    149, 147, 142, 137, 131, 126, 122, 120, 109, 107, 102, 97, 91, 86, 82, 80,
    128, 130, 134, 139, 145, 150, 154, 157, 158, 160, 164, 166, 166, 164, 160, 158,
    152, 149, 145, 140, 134, 129, 125, 123, 112, 109, 105, 100, 94, 89, 85, 83,
    131, 134, 138, 143, 149, 154, 158, 161, 162, 164, 168, 170, 170, 168, 164, 162,
    156, 153, 149, 144, 138, 133, 129, 126, 116, 113, 109, 104, 98, 93, 89, 86,
    135, 138, 142, 147, 153, 158, 162, 165, 166, 168, 172, 174, 174, 172, 168, 166,
    160, 157, 153, 148, 142, 137, 133, 130, 120, 117, 113, 108, 102, 97, 93, 90,
    139, 142, 146, 151, 157, 162, 166, 168, 170, 172, 176, 178, 178, 176, 172, 170,
    163, 161, 157, 152, 146, 141, 137, 134, 123, 121, 117, 112, 106, 101, 97, 94,
    142, 144, 149, 154, 160, 165, 169, 171, 173, 175, 179, 181, 181, 179, 175, 173,
    166, 164, 160, 155, 149, 144, 139, 137, 126, 124, 120, 115, 109, 104, 99, 97,
    144, 146, 150, 156, 161, 167, 171, 173, 174, 177, 180, 182, 182, 180, 177, 174,
    168, 166, 162, 156, 151, 145, 141, 139, 128, 126, 122, 116, 111, 105, 101, 99,
];

pub const LIBJPEG_Q50: [u8; 1024] = [
    139, 145, 153, 158, 161, 165, 170, 174, 178, 179, 180, 180, 179, 178, 176, 175,
    172, 166, 159, 154, 150, 145, 138, 133, 127, 125, 120, 115, 110, 107, 105, 104,
    138, 145, 152, 158, 161, 164, 169, 174, 178, 179, 179, 180, 179, 177, 175, 174,
    171, 166, 159, 154, 150, 145, 138, 132, 127, 124, 119, 114, 110, 106, 105, 104,
    137, 143, 151, 156, 159, 163, 168, 172, 176, 177, 178, 178, 177, 176, 174, 172,
    170, 165, 158, 153, 149, 144, 137, 131, 125, 122, 118, 113, 108, 105, 103, 102,
    134, 140, 148, 153, 156, 159, 164, 169, 173, 174, 175, 175, 174, 172, 170, 169,
    168, 162, 155, 150, 147, 141, 134, 129, 122, 119, 115, 109, 105, 102, 100, 99,
    129, 135, 143, 148, 151, 154, 160, 164, 168, 169, 170, 170, 169, 167, 166, 164,
    164, 158, 151, 146, 142, 137, 130, 125, 117, 114, 110, 104, 100, 97, 95, 94,
    123, 129, 137, 142, 145, 148, 154, 158, 162, 163, 164, 164, 163, 161, 160, 158,
    159, 153, 146, 141, 137, 132, 125, 120, 111, 108, 104, 99, 94, 91, 89, 88,
    117, 123, 131, 137, 140, 143, 148, 152, 157, 157, 158, 158, 158, 156, 154, 153,
    154, 148, 141, 136, 132, 127, 120, 115, 106, 103, 98, 93, 89, 85, 83, 83,
    114, 120, 128, 133, 136, 140, 145, 149, 153, 154, 155, 155, 154, 153, 151, 150,
    151, 145, 138, 133, 129, 124, 117, 112, 102, 100, 95, 90, 85, 82, 80, 79,
    106, 112, 120, 125, 128, 131, 136, 141, 145, 146, 147, 147, 146, 144, 142, 141,
    138, 133, 126, 121, 117, 112, 105, 99, 94, 91, 86, 80, 74, 71, 68, 67,
    102, 108, 116, 122, 125, 128, 133, 138, 142, 142, 143, 144, 143, 141, 139, 138,
    135, 130, 122, 117, 114, 109, 102, 96, 91, 88, 82, 77, 71, 67, 65, 64,
    97, 103, 111, 116, 119, 123, 128, 132, 136, 137, 138, 138, 137, 136, 134, 133,
    130, 124, 117, 112, 108, 103, 96, 91, 85, 82, 77, 71, 66, 62, 59, 58,
    91, 97, 105, 110, 113, 117, 122, 126, 130, 131, 132, 132, 131, 130, 128, 127,
    124, 118, 111, 106, 102, 97, 90, 85, 79, 76, 71, 65, 60, 56, 54, 52,
    86, 92, 100, 105, 108, 112, 117, 121, 125, 126, 127, 127, 126, 125, 123, 122,
    119, 113, 106, 101, 97, 92, 85, 80, 74, 71, 66, 60, 55, 51, 49, 48,
    83, 89, 97, 102, 105, 109, 114, 118, 122, 123, 124, 124, 123, 122, 120, 118,
    115, 110, 103, 98, 94, 89, 82, 76, 71, 68, 63, 57, 52, 48, 45, 44,
    81, 87, 95, 101, 103, 107, 112, 116, 121, 121, 122, 122, 122, 120, 118, 117,
    114, 108, 101, 96, 93, 87, 80, 75, 69, 66, 61, 55, 50, 46, 44, 43,
    81, 87, 95, 100, 103, 106, 112, 116, 120, 121, 122, 122, 121, 119, 118, 116,
    113, 108, 101, 96, 92, 87, 80, 74, 69, 66, 61, 55, 50, 46, 43, 42,
    79, 85, 93, 98, 101, 104, 110, 114, 118, 119, 120, 120, 119, 117, 116, 114,
    113, 108, 101, 96, 92, 87, 80, 74, 69, 66, 61, 55, 50, 46, 43, 42,
    79, 85, 93, 99, 101, 105, 110, 114, 119, 119, 120, 120, 120, 118, 116, 115,
    114, 108, 101, 96, 93, 87, 80, 75, 69, 66, 61, 55, 50, 46, 44, 43,
    81, 87, 95, 100, 103, 107, 112, 116, 120, 121, 122, 122, 121, 120, 118, 116,
    115, 110, 103, 98, 94, 89, 82, 76, 71, 68, 63, 57, 52, 48, 45, 44,
    84, 90, 98, 103, 106, 110, 115, 119, 123, 124, 125, 125, 124, 123, 121, 120,
    119, 113, 106, 101, 97, 92, 85, 80, 74, 71, 66, 60, 55, 51, 49, 48,
    89, 95, 103, 108, 111, 115, 120, 124, 128, 129, 130, 130, 129, 128, 126, 125,
    124, 118, 111, 106, 102, 97, 90, 85, 79, 76, 71, 65, 60, 56, 54, 52,
    95, 101, 109, 114, 117, 121, 126, 130, 134, 135, 136, 136, 135, 134, 132, 131,
    130, 124, 117, 112, 108, 103, 96, 91, 85, 82, 77, 71, 66, 62, 59, 58,
    100, 106, 114, 120, 123, 126, 131, 136, 140, 140, 141, 142, 141, 139, 137, 136,
    135, 130, 122, 117, 114, 109, 102, 96, 91, 88, 82, 77, 71, 67, 65, 64,
    104, 110, 118, 123, 126, 129, 134, 139, 143, 144, 145, 145, 144, 142, 140, 139,
    138, 133, 126, 121, 117, 112, 105, 99, 94, 91, 86, 80, 74, 71, 68, 67,
    112, 118, 126, 131, 134, 138, 143, 147, 151, 152, 153, 153, 152, 151, 149, 148,
    145, 141, 135, 131, 127, 121, 113, 106, 100, 98, 93, 88, 83, 80, 78, 77,
    115, 121, 129, 135, 138, 141, 146, 150, 155, 155, 156, 156, 156, 154, 152, 151,
    148, 144, 138, 134, 130, 124, 116, 109, 104, 101, 96, 91, 87, 83, 81, 81,
    121, 127, 135, 140, 143, 146, 152, 156, 160, 161, 162, 162, 161, 159, 158, 156,
    154, 149, 144, 139, 136, 130, 121, 115, 109, 106, 102, 97, 92, 89, 87, 86,
    127, 133, 141, 146, 149, 152, 158, 162, 166, 167, 168, 168, 167, 165, 164, 162,
    160, 155, 149, 145, 142, 136, 127, 121, 115, 112, 108, 102, 98, 95, 93, 92,
    132, 138, 146, 151, 154, 157, 162, 167, 171, 172, 173, 173, 172, 170, 168, 167,
    165, 160, 154, 150, 147, 141, 132, 126, 120, 117, 113, 107, 103, 100, 98, 97,
    135, 141, 149, 154, 157, 161, 166, 170, 174, 175, 176, 176, 175, 174, 172, 170,
    168, 163, 158, 154, 150, 144, 135, 129, 123, 120, 116, 111, 106, 103, 101, 100,
    136, 143, 150, 156, 159, 162, 167, 172, 176, 177, 177, 178, 177, 175, 173, 172,
    170, 165, 159, 155, 151, 145, 137, 130, 125, 122, 117, 112, 108, 104, 103, 102,
    137, 143, 151, 156, 159, 163, 168, 172, 176, 177, 178, 178, 177, 176, 174, 173,
    170, 166, 160, 156, 152, 146, 138, 131, 125, 123, 118, 113, 108, 105, 103, 102,
];
