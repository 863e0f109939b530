# two dimensions, three timesteps, two classes
@problemName basic
@timeStamps false
@univariate false
@dimensions 2
@equalLength true
@seriesLength 3
@classLabel true a b
@data
1.0,2.0,3.0:4.0,5.0,6.0:a
0.5,0.25,0.125:2.5,3.5,4.5:b
