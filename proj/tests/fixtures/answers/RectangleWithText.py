import gdspy

MM = 1000  # gdspy user unit is 1 um

lib = gdspy.GdsLibrary()
cell = lib.new_cell("RECT_TEXT")
cell.add(gdspy.Rectangle((-15 * MM, -5 * MM), (15 * MM, 5 * MM), layer=0))
cell.add(gdspy.Label("IBM Research", (0, 0), anchor="o", layer=1))
lib.write_gds("rectangle_with_text.gds")
