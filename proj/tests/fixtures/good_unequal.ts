@problemName unequal
@univariate false
@dimensions 2
@equalLength false
@classLabel true x y
@data
1,2,3,4:5,6,7,8:x
1,2:3,4:y
9,8,7:6,5,4:x
