"""Geometry helpers.
Areas only.
"""

# rectangle area
def area(width, height):
    product = width * height
    return product

WIDTH = 3
