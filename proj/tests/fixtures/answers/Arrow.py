import gdspy

MM = 1000  # gdspy user unit is 1 um
length = 10 * MM
head_len = 3 * MM
head_w = 3 * MM
body_w = head_w / 3

lib = gdspy.GdsLibrary()
cell = lib.new_cell("ARROW")
points = [
    (0, -body_w / 2),
    (length - head_len, -body_w / 2),
    (length - head_len, -head_w / 2),
    (length, 0),
    (length - head_len, head_w / 2),
    (length - head_len, body_w / 2),
    (0, body_w / 2),
]
cell.add(gdspy.Polygon(points, layer=0))
lib.write_gds("arrow.gds")
